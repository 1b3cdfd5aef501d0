#pragma once

#include <cmath>
#include <span>
#include <string>

#include "numeracy/nn/params.hpp"

namespace numeracy::nn {

// Activations are column-major: one column per example.

/// y = W x + b. Weights Xavier-uniform, bias zero.
class Dense {
 public:
  Dense() = default;
  Dense(ParamStore& store, const std::string& prefix, Eigen::Index in, Eigen::Index out,
        std::uint64_t seed);

  Matrix forward(const Matrix& x) const;
  /// Accumulates weight gradients; returns dL/dx when `want_input_grad`.
  Matrix backward(const Matrix& x, const Matrix& dy, bool want_input_grad = true);

  Eigen::Index in_dim() const { return w_->value.cols(); }
  Eigen::Index out_dim() const { return w_->value.rows(); }

 private:
  Param* w_ = nullptr;
  Param* b_ = nullptr;
};

Matrix relu(const Matrix& x);
/// dy masked by (pre > 0).
Matrix relu_backward(const Matrix& pre, const Matrix& dy);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Elementwise logistic and tanh over arrays, both through Eigen's vectorised exp.
template <class Derived>
Eigen::ArrayXXd sigmoid_array(const Eigen::ArrayBase<Derived>& x) {
  return (1.0 + (-x).exp()).inverse();
}
template <class Derived>
Eigen::ArrayXXd tanh_array(const Eigen::ArrayBase<Derived>& x) {
  return 2.0 * (1.0 + (-2.0 * x).exp()).inverse() - 1.0;
}

/// Single-layer LSTM with fused gate weights, rows ordered [input, forget,
/// output, candidate]:
///   wx: 4H x D, wh: 4H x H, b: 4H (forget block initialised to 1).
///
/// Sequences are batched step-major: column t*B + b of every T*B-column
/// matrix is step t of sequence b. The initial state is zero.
class Lstm {
 public:
  struct Tape {
    Matrix inputs;           // D x K
    std::vector<int> index;  // T*B entries into inputs' columns, or empty
    Eigen::Index steps = 0;
    Eigen::Index batch = 0;
    Matrix gates;   // 4H x T*B, post-activation
    Matrix cells;   // H x T*B
    Matrix hidden;  // H x T*B
  };

  Lstm() = default;
  Lstm(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
       Eigen::Index hidden_dim, std::uint64_t seed);

  /// `inputs` holds K candidate input vectors; `index` (length T*B) selects
  /// the column fed at each (step, sequence). With an empty index, inputs
  /// must have exactly T*B columns. Input projections are computed once per
  /// distinct column. Returns all hidden states, H x T*B.
  Matrix forward(const Matrix& inputs, std::span<const int> index, Eigen::Index steps,
                 Tape* tape) const;

  /// `d_hidden` is dL/dh for every step (H x T*B). Accumulates parameter
  /// gradients; returns dL/d(inputs) (D x K) when `want_input_grad`.
  Matrix backward(const Tape& tape, const Matrix& d_hidden, bool want_input_grad = true);

  Eigen::Index input_dim() const { return wx_->value.cols(); }
  Eigen::Index hidden_dim() const { return wh_->value.cols(); }

 private:
  Param* wx_ = nullptr;
  Param* wh_ = nullptr;
  Param* b_ = nullptr;
};

}  // namespace numeracy::nn
