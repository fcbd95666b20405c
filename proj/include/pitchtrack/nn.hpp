#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "pitchtrack/errors.hpp"
#include "pitchtrack/util.hpp"

// Reverse-mode kernels for the tracking network: affine layers, ReLU MLPs,
// a single-layer LSTM cell, channel-mixing 1x1 convolution and a small
// strided 2D convolution. Every forward can record a tape; the matching
// backward consumes it and accumulates parameter gradients into a
// same-shaped mirror struct. Batched inputs go in as columns.

namespace pitchtrack::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Affine + MLP

struct Linear {
  Matrix w;  // out x in
  Vector b;  // out

  static Linear zeros_like(const Linear& o) {
    return {Matrix::Zero(o.w.rows(), o.w.cols()), Vector::Zero(o.b.size())};
  }
};

// Kaiming-uniform fan-in initialization for ReLU stacks.
Linear make_linear(int in, int out, Rng& rng);

Matrix linear_forward(const Linear& l, const Matrix& x);
// Accumulates dW, db; returns dx.
Matrix linear_backward(const Linear& l, const Matrix& x, const Matrix& dy,
                       Linear& grad);

// ReLU on hidden layers, linear output.
struct Mlp {
  std::vector<Linear> layers;

  int input_dim() const { return static_cast<int>(layers.front().w.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().w.rows()); }
  static Mlp zeros_like(const Mlp& o);
};

Mlp make_mlp(int input_dim, const std::vector<int>& widths, Rng& rng);

struct MlpTape {
  std::vector<Matrix> inputs;  // input fed to each layer
};

Matrix mlp_forward(const Mlp& mlp, const Matrix& x, MlpTape* tape = nullptr);
Matrix mlp_backward(const Mlp& mlp, const MlpTape& tape, const Matrix& dy,
                    Mlp& grad);

// ---------------------------------------------------------------------------
// LSTM cell (single layer; gate rows stacked i, f, g, o)

struct LstmCell {
  Matrix w_ih;  // 4H x in
  Matrix w_hh;  // 4H x H
  Vector b;     // 4H

  int hidden() const { return static_cast<int>(w_hh.cols()); }
  int input() const { return static_cast<int>(w_ih.cols()); }
  static LstmCell zeros_like(const LstmCell& o) {
    return {Matrix::Zero(o.w_ih.rows(), o.w_ih.cols()),
            Matrix::Zero(o.w_hh.rows(), o.w_hh.cols()), Vector::Zero(o.b.size())};
  }
};

// Uniform +-1/sqrt(fan_in) weights, forget-gate bias 1.
LstmCell make_lstm(int input, int hidden, Rng& rng);

struct LstmState {
  Vector h, c;

  static LstmState zero(int hidden) {
    return {Vector::Zero(hidden), Vector::Zero(hidden)};
  }
};

struct LstmTape {
  Vector x, h_prev, c_prev;
  Vector gi, gf, gg, go;  // post-activation gates
  Vector c_new, tanh_c;
};

// Advances state in place; returns the new h.
Vector lstm_step(const LstmCell& cell, const Vector& x, LstmState& state,
                 LstmTape* tape = nullptr);

// dh/dc are gradients flowing into this step's outputs (h', c').
void lstm_backward(const LstmCell& cell, const LstmTape& tape, const Vector& dh,
                   const Vector& dc, Vector& dx, Vector& dh_prev,
                   Vector& dc_prev, LstmCell& grad);

// ---------------------------------------------------------------------------
// Convolutions

// Channel mixer: y(cell) = w . x(:, cell) + b.
struct Conv1x1 {
  Vector w;  // channels
  double b = 0.0;

  static Conv1x1 zeros_like(const Conv1x1& o) {
    return {Vector::Zero(o.w.size()), 0.0};
  }
};

Conv1x1 make_conv1x1(int channels, Rng& rng);

// x is channels x cells.
Eigen::RowVectorXd conv1x1_forward(const Conv1x1& c, const Matrix& x);
void conv1x1_backward(const Conv1x1& c, const Matrix& x,
                      const Eigen::RowVectorXd& dy, Conv1x1& grad,
                      Matrix* dx = nullptr);

// Square-kernel valid convolution with stride, im2col-backed. Feature maps
// travel as (channels x height*width) matrices in row-major cell order.
struct Conv2d {
  int in_ch = 0, out_ch = 0, ksize = 3, stride = 2;
  Matrix w;  // out_ch x (in_ch * ksize * ksize)
  Vector b;  // out_ch

  static Conv2d zeros_like(const Conv2d& o) {
    Conv2d z = o;
    z.w.setZero();
    z.b.setZero();
    return z;
  }
};

Conv2d make_conv2d(int in_ch, int out_ch, int ksize, int stride, Rng& rng);

inline int conv2d_out_extent(int in, int ksize, int stride) {
  return (in - ksize) / stride + 1;
}

struct Conv2dTape {
  Matrix cols;  // (in_ch*k*k) x (out_h*out_w)
  int in_h = 0, in_w = 0;
};

Matrix conv2d_forward(const Conv2d& c, const Matrix& x, int in_h, int in_w,
                      Conv2dTape* tape = nullptr);
// Returns dx (in_ch x in_h*in_w).
Matrix conv2d_backward(const Conv2d& c, const Conv2dTape& tape, const Matrix& dy,
                       Conv2d& grad);

// Conv -> ReLU stack ending in global average pooling.
struct ConvStack {
  std::vector<Conv2d> layers;

  static ConvStack zeros_like(const ConvStack& o);
};

struct ConvStackTape {
  std::vector<Conv2dTape> conv;
  std::vector<Matrix> pre_relu;
  int final_h = 0, final_w = 0;
};

// x: in_ch x (h*w). Returns the pooled feature vector (out_ch of the last layer).
Vector conv_stack_forward(const ConvStack& s, const Matrix& x, int h, int w,
                          ConvStackTape* tape = nullptr);
void conv_stack_backward(const ConvStack& s, const ConvStackTape& tape,
                         const Vector& dpooled, ConvStack& grad);

// ---------------------------------------------------------------------------
// Parameter store

// Named view into one parameter tensor. Collections enumerate in a fixed
// order, which fixes checkpoint layout, Adam slot order and gradient-check
// coordinates.
struct TensorRef {
  std::string name;
  std::vector<std::uint32_t> dims;
  double* data = nullptr;
  Eigen::Index size = 0;
};

void append_params(Linear& l, const std::string& prefix, std::vector<TensorRef>& out);
void append_params(Mlp& m, const std::string& prefix, std::vector<TensorRef>& out);
void append_params(LstmCell& c, const std::string& prefix, std::vector<TensorRef>& out);
void append_params(Conv1x1& c, const std::string& prefix, std::vector<TensorRef>& out);
void append_params(Conv2d& c, const std::string& prefix, std::vector<TensorRef>& out);
void append_params(ConvStack& s, const std::string& prefix, std::vector<TensorRef>& out);

void zero_all(const std::vector<TensorRef>& refs);
Eigen::Index total_size(const std::vector<TensorRef>& refs);

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  std::vector<Vector> m, v;
  long t = 0;
};

// params and grads must enumerate the same tensors in the same order.
void adam_step(const std::vector<TensorRef>& params,
               const std::vector<TensorRef>& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

}  // namespace pitchtrack::nn
