#include "pitchtrack/nn.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "pitchtrack/checkpoint.hpp"
#include "support/test_util.hpp"

using namespace pitchtrack;
using nn::Matrix;
using nn::Vector;
using testsupport::finite_diff_check;

namespace {

Matrix random_matrix(int r, int c, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  Matrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST(Linear, IdentityPassesThrough) {
  nn::Linear l{Matrix::Identity(3, 3), Vector::Zero(3)};
  const Matrix x = random_matrix(3, 5, 1);
  EXPECT_LT((nn::linear_forward(l, x) - x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mlp, ZeroWeightsYieldLastBias) {
  Rng rng(2);
  nn::Mlp mlp = nn::make_mlp(4, {8, 3}, rng);
  for (auto& l : mlp.layers) l.w.setZero();
  mlp.layers.back().b << 0.5, -1.0, 2.0;
  const Matrix y = nn::mlp_forward(mlp, random_matrix(4, 6, 3));
  for (int c = 0; c < y.cols(); ++c) {
    EXPECT_DOUBLE_EQ(y(0, c), 0.5);
    EXPECT_DOUBLE_EQ(y(1, c), -1.0);
    EXPECT_DOUBLE_EQ(y(2, c), 2.0);
  }
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  nn::Mlp mlp = nn::make_mlp(6, {10, 4}, rng);
  const Matrix x = random_matrix(6, 3, 7);
  const Matrix target = random_matrix(4, 3, 8);

  auto loss_value = [&] {
    const Matrix y = nn::mlp_forward(mlp, x);
    return 0.5 * (y - target).squaredNorm();
  };

  nn::Mlp grad = nn::Mlp::zeros_like(mlp);
  nn::MlpTape tape;
  const Matrix y = nn::mlp_forward(mlp, x, &tape);
  nn::mlp_backward(mlp, tape, y - target, grad);

  auto params = std::vector<nn::TensorRef>{};
  nn::append_params(mlp, "mlp", params);
  auto grads = std::vector<nn::TensorRef>{};
  nn::append_params(grad, "mlp", grads);
  const auto res = finite_diff_check(params, grads, loss_value, 100, 99);
  EXPECT_LT(res.max_rel_err, 1e-4);
}

TEST(Mlp, InputGradientMatchesFiniteDifferences) {
  Rng rng(6);
  nn::Mlp mlp = nn::make_mlp(5, {7, 3}, rng);
  Matrix x = random_matrix(5, 2, 17);
  const Matrix target = random_matrix(3, 2, 18);

  nn::Mlp grad = nn::Mlp::zeros_like(mlp);
  nn::MlpTape tape;
  const Matrix y = nn::mlp_forward(mlp, x, &tape);
  const Matrix dx = nn::mlp_backward(mlp, tape, y - target, grad);

  const double eps = 1e-5;
  for (int i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + eps;
    const double up = 0.5 * (nn::mlp_forward(mlp, x) - target).squaredNorm();
    x.data()[i] = saved - eps;
    const double down = 0.5 * (nn::mlp_forward(mlp, x) - target).squaredNorm();
    x.data()[i] = saved;
    EXPECT_LT(testsupport::rel_err(dx.data()[i], (up - down) / (2 * eps)), 1e-4);
  }
}

TEST(Lstm, ZeroEverythingGivesZeroOutput) {
  Rng rng(3);
  nn::LstmCell cell = nn::make_lstm(2, 8, rng);
  cell.w_ih.setZero();
  cell.w_hh.setZero();
  cell.b.setZero();
  nn::LstmState state = nn::LstmState::zero(8);
  const Vector h = nn::lstm_step(cell, Vector::Zero(2), state);
  EXPECT_EQ(h.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lstm, OutputBoundedByOne) {
  Rng rng(4);
  nn::LstmCell cell = nn::make_lstm(2, 16, rng);
  nn::LstmState state = nn::LstmState::zero(16);
  std::uniform_real_distribution<double> big(-50.0, 50.0);
  for (int t = 0; t < 20; ++t) {
    Vector x(2);
    x << big(rng), big(rng);
    const Vector h = nn::lstm_step(cell, x, state);
    ASSERT_LE(h.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(Lstm, UnrolledGradientMatchesFiniteDifferences) {
  const int hidden = 12, steps = 5;
  Rng rng(11);
  nn::LstmCell cell = nn::make_lstm(2, hidden, rng);
  std::vector<Vector> inputs;
  for (int t = 0; t < steps; ++t)
    inputs.push_back(random_matrix(2, 1, 100 + t).col(0));
  const Matrix targets = random_matrix(hidden, steps, 200);

  // Loss couples every step's output so BPTT must thread dh and dc.
  auto loss_value = [&] {
    nn::LstmState state = nn::LstmState::zero(hidden);
    double loss = 0.0;
    for (int t = 0; t < steps; ++t) {
      const Vector h = nn::lstm_step(cell, inputs[t], state);
      loss += 0.5 * (h - targets.col(t)).squaredNorm();
    }
    return loss;
  };

  nn::LstmCell grad = nn::LstmCell::zeros_like(cell);
  std::vector<nn::LstmTape> tapes(steps);
  std::vector<Vector> outputs(steps);
  {
    nn::LstmState state = nn::LstmState::zero(hidden);
    for (int t = 0; t < steps; ++t)
      outputs[t] = nn::lstm_step(cell, inputs[t], state, &tapes[t]);
  }
  Vector dh = Vector::Zero(hidden), dc = Vector::Zero(hidden);
  for (int t = steps - 1; t >= 0; --t) {
    const Vector dh_total = dh + (outputs[t] - targets.col(t));
    Vector dx, dh_prev, dc_prev;
    nn::lstm_backward(cell, tapes[t], dh_total, dc, dx, dh_prev, dc_prev, grad);
    dh = dh_prev;
    dc = dc_prev;
  }

  std::vector<nn::TensorRef> params, grads;
  nn::append_params(cell, "lstm", params);
  nn::append_params(grad, "lstm", grads);
  const auto res = finite_diff_check(params, grads, loss_value, 100, 31337);
  EXPECT_LT(res.max_rel_err, 1e-3);
}

TEST(Conv1x1, OneHotSelectsChannel) {
  nn::Conv1x1 c{Vector::Zero(3), 0.0};
  c.w(0) = 1.0;
  const Matrix x = random_matrix(3, 10, 21);
  const Eigen::RowVectorXd y = nn::conv1x1_forward(c, x);
  EXPECT_LT((y - x.row(0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Conv1x1, UniformWeightsGiveChannelMean) {
  const int ch = 4;
  nn::Conv1x1 c{Vector::Constant(ch, 1.0 / ch), 0.0};
  const Matrix x = random_matrix(ch, 9, 22);
  const Eigen::RowVectorXd y = nn::conv1x1_forward(c, x);
  EXPECT_LT((y - x.colwise().mean()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Conv1x1, GradientMatchesFiniteDifferences) {
  Rng rng(23);
  nn::Conv1x1 c = nn::make_conv1x1(4, rng);
  const Matrix x = random_matrix(4, 25, 24);
  const Eigen::RowVectorXd target = random_matrix(1, 25, 25).row(0);

  auto loss_value = [&] {
    return 0.5 * (nn::conv1x1_forward(c, x) - target).squaredNorm();
  };
  nn::Conv1x1 grad = nn::Conv1x1::zeros_like(c);
  nn::conv1x1_backward(c, x, nn::conv1x1_forward(c, x) - target, grad);

  std::vector<nn::TensorRef> params, grads;
  nn::append_params(c, "c", params);
  nn::append_params(grad, "c", grads);
  const auto res = finite_diff_check(params, grads, loss_value, 10, 5);
  EXPECT_LT(res.max_rel_err, 1e-4);
}

TEST(Conv2d, GradientMatchesFiniteDifferences) {
  Rng rng(31);
  nn::Conv2d c = nn::make_conv2d(2, 3, 3, 2, rng);
  const Matrix x = random_matrix(2, 81, 32);  // 9x9 map
  const int oh = nn::conv2d_out_extent(9, 3, 2);
  const Matrix target = random_matrix(3, oh * oh, 33);

  auto loss_value = [&] {
    return 0.5 * (nn::conv2d_forward(c, x, 9, 9) - target).squaredNorm();
  };
  nn::Conv2d grad = nn::Conv2d::zeros_like(c);
  nn::Conv2dTape tape;
  const Matrix y = nn::conv2d_forward(c, x, 9, 9, &tape);
  nn::conv2d_backward(c, tape, y - target, grad);

  std::vector<nn::TensorRef> params, grads;
  nn::append_params(c, "conv", params);
  nn::append_params(grad, "conv", grads);
  const auto res = finite_diff_check(params, grads, loss_value, 60, 6);
  EXPECT_LT(res.max_rel_err, 1e-4);
}

TEST(Conv2d, InputGradientMatchesFiniteDifferences) {
  Rng rng(41);
  nn::Conv2d c = nn::make_conv2d(2, 2, 3, 2, rng);
  Matrix x = random_matrix(2, 49, 42);  // 7x7
  const int oh = nn::conv2d_out_extent(7, 3, 2);
  const Matrix target = random_matrix(2, oh * oh, 43);

  nn::Conv2d grad = nn::Conv2d::zeros_like(c);
  nn::Conv2dTape tape;
  const Matrix y = nn::conv2d_forward(c, x, 7, 7, &tape);
  const Matrix dx = nn::conv2d_backward(c, tape, y - target, grad);

  const double eps = 1e-5;
  for (int i = 0; i < x.size(); i += 7) {
    const double saved = x.data()[i];
    x.data()[i] = saved + eps;
    const double up = 0.5 * (nn::conv2d_forward(c, x, 7, 7) - target).squaredNorm();
    x.data()[i] = saved - eps;
    const double down = 0.5 * (nn::conv2d_forward(c, x, 7, 7) - target).squaredNorm();
    x.data()[i] = saved;
    EXPECT_LT(testsupport::rel_err(dx.data()[i], (up - down) / (2 * eps)), 1e-4);
  }
}

TEST(ConvStack, PooledGradientMatchesFiniteDifferences) {
  Rng rng(51);
  nn::ConvStack stack;
  stack.layers = {nn::make_conv2d(3, 4, 3, 2, rng), nn::make_conv2d(4, 6, 3, 2, rng)};
  const Matrix x = random_matrix(3, 11 * 11, 52);
  const Vector target = random_matrix(6, 1, 53).col(0);

  auto loss_value = [&] {
    return 0.5 * (nn::conv_stack_forward(stack, x, 11, 11) - target).squaredNorm();
  };
  nn::ConvStack grad = nn::ConvStack::zeros_like(stack);
  nn::ConvStackTape tape;
  const Vector y = nn::conv_stack_forward(stack, x, 11, 11, &tape);
  nn::conv_stack_backward(stack, tape, y - target, grad);

  std::vector<nn::TensorRef> params, grads;
  nn::append_params(stack, "s", params);
  nn::append_params(grad, "s", grads);
  const auto res = finite_diff_check(params, grads, loss_value, 80, 7);
  EXPECT_LT(res.max_rel_err, 1e-3);
}

TEST(Backward, ZeroUpstreamGivesZeroGrads) {
  Rng rng(61);
  nn::Mlp mlp = nn::make_mlp(4, {6, 2}, rng);
  nn::Mlp grad = nn::Mlp::zeros_like(mlp);
  nn::MlpTape tape;
  nn::mlp_forward(mlp, random_matrix(4, 3, 62), &tape);
  nn::mlp_backward(mlp, tape, Matrix::Zero(2, 3), grad);
  for (const auto& l : grad.layers) {
    EXPECT_EQ(l.w.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(l.b.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Backward, SingleAffineLayerClosedForm) {
  // L = 0.5 |W x|^2 gives dW = (W x) x^T exactly.
  Rng rng(63);
  nn::Mlp mlp = nn::make_mlp(3, {2}, rng);
  mlp.layers[0].b.setZero();
  const Matrix x = random_matrix(3, 1, 64);

  nn::Mlp grad = nn::Mlp::zeros_like(mlp);
  nn::MlpTape tape;
  const Matrix y = nn::mlp_forward(mlp, x, &tape);
  nn::mlp_backward(mlp, tape, y, grad);

  const Matrix expect = y * x.transpose();
  EXPECT_LT((grad.layers[0].w - expect).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Adam, ZeroGradLeavesParamsUntouched) {
  Rng rng(71);
  nn::Mlp mlp = nn::make_mlp(3, {4, 2}, rng);
  nn::Mlp zero = nn::Mlp::zeros_like(mlp);
  const nn::Mlp before = mlp;

  std::vector<nn::TensorRef> params, grads;
  nn::append_params(mlp, "m", params);
  nn::append_params(zero, "m", grads);
  nn::AdamState state;
  nn::adam_step(params, grads, state, 1e-3);

  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    EXPECT_EQ((mlp.layers[l].w - before.layers[l].w).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((mlp.layers[l].b - before.layers[l].b).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Adam, FirstStepMatchesHandComputation) {
  // After one step with gradient g: m_hat = g, v_hat = g^2, so the update is
  // exactly -lr * g / (|g| + eps).
  nn::Linear l{Matrix::Zero(1, 1), Vector::Zero(1)};
  l.w(0, 0) = 0.25;
  nn::Linear g{Matrix::Zero(1, 1), Vector::Zero(1)};
  g.w(0, 0) = 0.3;

  std::vector<nn::TensorRef> params, grads;
  nn::append_params(l, "l", params);
  nn::append_params(g, "l", grads);
  nn::AdamState state;
  nn::adam_step(params, grads, state, 0.01);

  const double expect = 0.25 - 0.01 * 0.3 / (0.3 + 1e-8);
  EXPECT_NEAR(l.w(0, 0), expect, 1e-12);
  EXPECT_EQ(l.b(0), 0.0);
}

TEST(Checkpoint, FileRoundTripsBitExact) {
  Rng rng(81);
  nn::Mlp mlp = nn::make_mlp(5, {7, 3}, rng);
  std::vector<nn::TensorRef> params;
  nn::append_params(mlp, "mlp", params);

  std::ostringstream first;
  save_checkpoint(first, params);

  nn::Mlp other = nn::Mlp::zeros_like(mlp);
  std::vector<nn::TensorRef> other_refs;
  nn::append_params(other, "mlp", other_refs);
  std::istringstream in(first.str());
  load_checkpoint(in, other_refs);

  std::ostringstream second;
  save_checkpoint(second, other_refs);
  EXPECT_EQ(first.str(), second.str());

  // Values survive at f32 precision.
  for (std::size_t l = 0; l < mlp.layers.size(); ++l)
    EXPECT_LT((other.layers[l].w - mlp.layers[l].w).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Checkpoint, NameMismatchThrows) {
  Rng rng(82);
  nn::Mlp mlp = nn::make_mlp(3, {2}, rng);
  std::vector<nn::TensorRef> params;
  nn::append_params(mlp, "mlp", params);
  std::ostringstream os;
  save_checkpoint(os, params);

  nn::Mlp other = mlp;
  std::vector<nn::TensorRef> renamed;
  nn::append_params(other, "different", renamed);
  std::istringstream in(os.str());
  EXPECT_THROW(load_checkpoint(in, renamed), ShapeMismatch);
}

TEST(Init, ForgetGateBiasIsOne) {
  Rng rng(91);
  const nn::LstmCell cell = nn::make_lstm(2, 8, rng);
  EXPECT_TRUE((cell.b.segment(8, 8).array() == 1.0).all());
  EXPECT_TRUE((cell.b.segment(0, 8).array() == 0.0).all());
}
