#include "pitchtrack/nn.hpp"

#include <cmath>

namespace pitchtrack::nn {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = uniform(rng, -bound, bound);
}

inline Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

inline Vector sigmoid(const Vector& x) {
  return ((-x.array()).exp() + 1.0).inverse().matrix();
}

}  // namespace

// ---------------------------------------------------------------------------

Linear make_linear(int in, int out, Rng& rng) {
  Linear l{Matrix(out, in), Vector::Zero(out)};
  fill_uniform(l.w, std::sqrt(6.0 / in), rng);
  return l;
}

Matrix linear_forward(const Linear& l, const Matrix& x) {
  if (x.rows() != l.w.cols())
    throw ShapeMismatch("linear: input dim " + std::to_string(x.rows()) +
                        " vs weight " + std::to_string(l.w.cols()));
  return (l.w * x).colwise() + l.b;
}

Matrix linear_backward(const Linear& l, const Matrix& x, const Matrix& dy,
                       Linear& grad) {
  grad.w.noalias() += dy * x.transpose();
  grad.b += dy.rowwise().sum();
  return l.w.transpose() * dy;
}

Mlp Mlp::zeros_like(const Mlp& o) {
  Mlp z;
  z.layers.reserve(o.layers.size());
  for (const auto& l : o.layers) z.layers.push_back(Linear::zeros_like(l));
  return z;
}

Mlp make_mlp(int input_dim, const std::vector<int>& widths, Rng& rng) {
  if (widths.empty()) throw ShapeMismatch("mlp needs at least one layer");
  Mlp m;
  int in = input_dim;
  for (int w : widths) {
    m.layers.push_back(make_linear(in, w, rng));
    in = w;
  }
  return m;
}

Matrix mlp_forward(const Mlp& mlp, const Matrix& x, MlpTape* tape) {
  if (tape) {
    tape->inputs.clear();
    tape->inputs.reserve(mlp.layers.size());
  }
  Matrix cur = x;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    if (tape) tape->inputs.push_back(cur);
    cur = linear_forward(mlp.layers[i], cur);
    if (i + 1 < mlp.layers.size()) cur = relu(cur);
  }
  return cur;
}

Matrix mlp_backward(const Mlp& mlp, const MlpTape& tape, const Matrix& dy,
                    Mlp& grad) {
  Matrix d = dy;
  for (int i = static_cast<int>(mlp.layers.size()) - 1; i >= 0; --i) {
    if (i + 1 < static_cast<int>(mlp.layers.size())) {
      // Undo the ReLU that followed layer i: its pre-activation is
      // recoverable from the next layer's input (post-ReLU equals
      // pre-activation clamped, and the mask is post > 0).
      const Matrix& post = tape.inputs[i + 1];
      d = (post.array() > 0.0).select(d, Matrix::Zero(d.rows(), d.cols()));
    }
    d = linear_backward(mlp.layers[i], tape.inputs[i], d, grad.layers[i]);
  }
  return d;
}

// ---------------------------------------------------------------------------

LstmCell make_lstm(int input, int hidden, Rng& rng) {
  LstmCell c{Matrix(4 * hidden, input), Matrix(4 * hidden, hidden),
             Vector::Zero(4 * hidden)};
  fill_uniform(c.w_ih, 1.0 / std::sqrt(static_cast<double>(input)), rng);
  fill_uniform(c.w_hh, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  c.b.segment(hidden, hidden).setConstant(1.0);  // forget gate opens wide
  return c;
}

Vector lstm_step(const LstmCell& cell, const Vector& x, LstmState& state,
                 LstmTape* tape) {
  const int h = cell.hidden();
  if (x.size() != cell.input()) throw ShapeMismatch("lstm: input size mismatch");
  if (state.h.size() != h || state.c.size() != h)
    throw ShapeMismatch("lstm: state size mismatch");

  const Vector pre = cell.w_ih * x + cell.w_hh * state.h + cell.b;
  const Vector gi = sigmoid(pre.segment(0, h));
  const Vector gf = sigmoid(pre.segment(h, h));
  const Vector gg = pre.segment(2 * h, h).array().tanh().matrix();
  const Vector go = sigmoid(pre.segment(3 * h, h));

  const Vector c_new = gf.cwiseProduct(state.c) + gi.cwiseProduct(gg);
  const Vector tc = c_new.array().tanh().matrix();
  const Vector h_new = go.cwiseProduct(tc);

  if (tape) *tape = LstmTape{x, state.h, state.c, gi, gf, gg, go, c_new, tc};
  state.c = c_new;
  state.h = h_new;
  return h_new;
}

void lstm_backward(const LstmCell& cell, const LstmTape& tape, const Vector& dh,
                   const Vector& dc, Vector& dx, Vector& dh_prev,
                   Vector& dc_prev, LstmCell& grad) {
  const int h = cell.hidden();
  const Vector d_c = dc + dh.cwiseProduct(tape.go)
                              .cwiseProduct((1.0 - tape.tanh_c.array().square()).matrix());

  const Vector d_go = dh.cwiseProduct(tape.tanh_c);
  const Vector d_gi = d_c.cwiseProduct(tape.gg);
  const Vector d_gf = d_c.cwiseProduct(tape.c_prev);
  const Vector d_gg = d_c.cwiseProduct(tape.gi);
  dc_prev = d_c.cwiseProduct(tape.gf);

  Vector d_pre(4 * h);
  d_pre.segment(0, h) =
      d_gi.cwiseProduct(tape.gi).cwiseProduct((1.0 - tape.gi.array()).matrix());
  d_pre.segment(h, h) =
      d_gf.cwiseProduct(tape.gf).cwiseProduct((1.0 - tape.gf.array()).matrix());
  d_pre.segment(2 * h, h) =
      d_gg.cwiseProduct((1.0 - tape.gg.array().square()).matrix());
  d_pre.segment(3 * h, h) =
      d_go.cwiseProduct(tape.go).cwiseProduct((1.0 - tape.go.array()).matrix());

  grad.w_ih.noalias() += d_pre * tape.x.transpose();
  grad.w_hh.noalias() += d_pre * tape.h_prev.transpose();
  grad.b += d_pre;
  dx = cell.w_ih.transpose() * d_pre;
  dh_prev = cell.w_hh.transpose() * d_pre;
}

// ---------------------------------------------------------------------------

Conv1x1 make_conv1x1(int channels, Rng& rng) {
  Conv1x1 c{Vector(channels), 0.0};
  const double bound = std::sqrt(6.0 / channels);
  for (int i = 0; i < channels; ++i) c.w(i) = uniform(rng, -bound, bound);
  return c;
}

Eigen::RowVectorXd conv1x1_forward(const Conv1x1& c, const Matrix& x) {
  if (x.rows() != c.w.size()) throw ShapeMismatch("conv1x1: channel mismatch");
  Eigen::RowVectorXd y = c.w.transpose() * x;
  y.array() += c.b;
  return y;
}

void conv1x1_backward(const Conv1x1& c, const Matrix& x,
                      const Eigen::RowVectorXd& dy, Conv1x1& grad, Matrix* dx) {
  grad.w.noalias() += x * dy.transpose();
  grad.b += dy.sum();
  if (dx) *dx = c.w * dy;
}

// ---------------------------------------------------------------------------

Conv2d make_conv2d(int in_ch, int out_ch, int ksize, int stride, Rng& rng) {
  Conv2d c;
  c.in_ch = in_ch;
  c.out_ch = out_ch;
  c.ksize = ksize;
  c.stride = stride;
  c.w = Matrix(out_ch, in_ch * ksize * ksize);
  c.b = Vector::Zero(out_ch);
  fill_uniform(c.w, std::sqrt(6.0 / (in_ch * ksize * ksize)), rng);
  return c;
}

namespace {

Matrix im2col(const Matrix& x, int in_ch, int in_h, int in_w, int k, int stride,
              int out_h, int out_w) {
  Matrix cols(in_ch * k * k, out_h * out_w);
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      const int col = oy * out_w + ox;
      int row = 0;
      for (int c = 0; c < in_ch; ++c)
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const int iy = oy * stride + ky, ix = ox * stride + kx;
            cols(row++, col) = x(c, iy * in_w + ix);
          }
    }
  }
  return cols;
}

Matrix col2im(const Matrix& dcols, int in_ch, int in_h, int in_w, int k,
              int stride, int out_h, int out_w) {
  Matrix dx = Matrix::Zero(in_ch, in_h * in_w);
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      const int col = oy * out_w + ox;
      int row = 0;
      for (int c = 0; c < in_ch; ++c)
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const int iy = oy * stride + ky, ix = ox * stride + kx;
            dx(c, iy * in_w + ix) += dcols(row++, col);
          }
    }
  }
  return dx;
}

}  // namespace

Matrix conv2d_forward(const Conv2d& c, const Matrix& x, int in_h, int in_w,
                      Conv2dTape* tape) {
  if (x.rows() != c.in_ch || x.cols() != static_cast<Eigen::Index>(in_h) * in_w)
    throw ShapeMismatch("conv2d: input shape mismatch");
  const int out_h = conv2d_out_extent(in_h, c.ksize, c.stride);
  const int out_w = conv2d_out_extent(in_w, c.ksize, c.stride);
  if (out_h <= 0 || out_w <= 0) throw ShapeMismatch("conv2d: input too small");
  Matrix cols = im2col(x, c.in_ch, in_h, in_w, c.ksize, c.stride, out_h, out_w);
  Matrix y = (c.w * cols).colwise() + c.b;
  if (tape) *tape = Conv2dTape{std::move(cols), in_h, in_w};
  return y;
}

Matrix conv2d_backward(const Conv2d& c, const Conv2dTape& tape, const Matrix& dy,
                       Conv2d& grad) {
  const int out_h = conv2d_out_extent(tape.in_h, c.ksize, c.stride);
  const int out_w = conv2d_out_extent(tape.in_w, c.ksize, c.stride);
  grad.w.noalias() += dy * tape.cols.transpose();
  grad.b += dy.rowwise().sum();
  const Matrix dcols = c.w.transpose() * dy;
  return col2im(dcols, c.in_ch, tape.in_h, tape.in_w, c.ksize, c.stride, out_h,
                out_w);
}

ConvStack ConvStack::zeros_like(const ConvStack& o) {
  ConvStack z;
  z.layers.reserve(o.layers.size());
  for (const auto& l : o.layers) z.layers.push_back(Conv2d::zeros_like(l));
  return z;
}

Vector conv_stack_forward(const ConvStack& s, const Matrix& x, int h, int w,
                          ConvStackTape* tape) {
  if (tape) {
    tape->conv.assign(s.layers.size(), {});
    tape->pre_relu.assign(s.layers.size(), {});
  }
  Matrix cur = x;
  int ch = h, cw = w;
  for (std::size_t i = 0; i < s.layers.size(); ++i) {
    cur = conv2d_forward(s.layers[i], cur, ch, cw, tape ? &tape->conv[i] : nullptr);
    if (tape) tape->pre_relu[i] = cur;
    cur = relu(cur);
    ch = conv2d_out_extent(ch, s.layers[i].ksize, s.layers[i].stride);
    cw = conv2d_out_extent(cw, s.layers[i].ksize, s.layers[i].stride);
  }
  if (tape) {
    tape->final_h = ch;
    tape->final_w = cw;
  }
  return cur.rowwise().mean();
}

void conv_stack_backward(const ConvStack& s, const ConvStackTape& tape,
                         const Vector& dpooled, ConvStack& grad) {
  const int cells = tape.final_h * tape.final_w;
  Matrix d = (dpooled / cells).replicate(1, cells);
  for (int i = static_cast<int>(s.layers.size()) - 1; i >= 0; --i) {
    d = (tape.pre_relu[i].array() > 0.0)
            .select(d, Matrix::Zero(d.rows(), d.cols()));
    d = conv2d_backward(s.layers[i], tape.conv[i], d, grad.layers[i]);
  }
}

// ---------------------------------------------------------------------------

namespace {

void push(std::vector<TensorRef>& out, const std::string& name, Matrix& m) {
  out.push_back({name,
                 {static_cast<std::uint32_t>(m.rows()),
                  static_cast<std::uint32_t>(m.cols())},
                 m.data(), m.size()});
}

void push(std::vector<TensorRef>& out, const std::string& name, Vector& v) {
  out.push_back({name, {static_cast<std::uint32_t>(v.size())}, v.data(), v.size()});
}

void push(std::vector<TensorRef>& out, const std::string& name, double& s) {
  out.push_back({name, {1u}, &s, 1});
}

}  // namespace

void append_params(Linear& l, const std::string& prefix, std::vector<TensorRef>& out) {
  push(out, prefix + ".w", l.w);
  push(out, prefix + ".b", l.b);
}

void append_params(Mlp& m, const std::string& prefix, std::vector<TensorRef>& out) {
  for (std::size_t i = 0; i < m.layers.size(); ++i)
    append_params(m.layers[i], prefix + "." + std::to_string(i), out);
}

void append_params(LstmCell& c, const std::string& prefix, std::vector<TensorRef>& out) {
  push(out, prefix + ".w_ih", c.w_ih);
  push(out, prefix + ".w_hh", c.w_hh);
  push(out, prefix + ".b", c.b);
}

void append_params(Conv1x1& c, const std::string& prefix, std::vector<TensorRef>& out) {
  push(out, prefix + ".w", c.w);
  push(out, prefix + ".b", c.b);
}

void append_params(Conv2d& c, const std::string& prefix, std::vector<TensorRef>& out) {
  push(out, prefix + ".w", c.w);
  push(out, prefix + ".b", c.b);
}

void append_params(ConvStack& s, const std::string& prefix, std::vector<TensorRef>& out) {
  for (std::size_t i = 0; i < s.layers.size(); ++i)
    append_params(s.layers[i], prefix + "." + std::to_string(i), out);
}

void zero_all(const std::vector<TensorRef>& refs) {
  for (const auto& r : refs) Eigen::Map<Vector>(r.data, r.size).setZero();
}

Eigen::Index total_size(const std::vector<TensorRef>& refs) {
  Eigen::Index n = 0;
  for (const auto& r : refs) n += r.size;
  return n;
}

void adam_step(const std::vector<TensorRef>& params,
               const std::vector<TensorRef>& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  if (params.size() != grads.size())
    throw ShapeMismatch("adam: param/grad count mismatch");
  if (state.m.empty()) {
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const auto& p : params) {
      state.m.push_back(Vector::Zero(p.size));
      state.v.push_back(Vector::Zero(p.size));
    }
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size != grads[i].size)
      throw ShapeMismatch("adam: tensor size mismatch at " + params[i].name);
    Eigen::Map<Vector> p(params[i].data, params[i].size);
    Eigen::Map<const Vector> g(grads[i].data, grads[i].size);
    auto& m = state.m[i];
    auto& v = state.v[i];
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  }
}

}  // namespace pitchtrack::nn
