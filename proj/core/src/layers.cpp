#include "numeracy/nn/layers.hpp"

#include "numeracy/random.hpp"

namespace numeracy::nn {

Dense::Dense(ParamStore& store, const std::string& prefix, Eigen::Index in, Eigen::Index out,
             std::uint64_t seed) {
  w_ = &store.add(prefix + ".w", out, in);
  b_ = &store.add(prefix + ".b", out, 1);
  xavier_uniform(w_->value, static_cast<double>(in), static_cast<double>(out), seed);
}

Matrix Dense::forward(const Matrix& x) const {
  Matrix y = w_->value * x;
  y.colwise() += b_->value.col(0);
  return y;
}

Matrix Dense::backward(const Matrix& x, const Matrix& dy, bool want_input_grad) {
  w_->grad.noalias() += dy * x.transpose();
  b_->grad.col(0) += dy.rowwise().sum();
  if (!want_input_grad) return {};
  return w_->value.transpose() * dy;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& pre, const Matrix& dy) {
  return (pre.array() > 0.0).select(dy, 0.0);
}

Lstm::Lstm(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
           Eigen::Index hidden_dim, std::uint64_t seed) {
  const Eigen::Index h = hidden_dim;
  wx_ = &store.add(prefix + ".wx", 4 * h, input_dim);
  wh_ = &store.add(prefix + ".wh", 4 * h, h);
  b_ = &store.add(prefix + ".b", 4 * h, 1);
  xavier_uniform(wx_->value, static_cast<double>(input_dim), static_cast<double>(h),
                 derive_seed({seed, 1}));
  xavier_uniform(wh_->value, static_cast<double>(h), static_cast<double>(h), derive_seed({seed, 2}));
  b_->value.block(h, 0, h, 1).setOnes();
}

Matrix Lstm::forward(const Matrix& inputs, std::span<const int> index, Eigen::Index steps,
                     Tape* tape) const {
  const Eigen::Index h = hidden_dim();
  const Eigen::Index total = index.empty() ? inputs.cols() : static_cast<Eigen::Index>(index.size());
  const Eigen::Index batch = total / steps;

  Matrix projected = wx_->value * inputs;
  Matrix gates(4 * h, total);
  if (index.empty()) {
    gates = projected;
  } else {
    for (Eigen::Index j = 0; j < total; ++j) gates.col(j) = projected.col(index[static_cast<std::size_t>(j)]);
  }
  gates.colwise() += b_->value.col(0);

  Matrix cells(h, total);
  Matrix hidden(h, total);
  for (Eigen::Index t = 0; t < steps; ++t) {
    auto g = gates.middleCols(t * batch, batch);
    if (t > 0) g.noalias() += wh_->value * hidden.middleCols((t - 1) * batch, batch);
    g.topRows(3 * h) = sigmoid_array(g.topRows(3 * h).array()).matrix();
    g.bottomRows(h) = tanh_array(g.bottomRows(h).array()).matrix();
    auto c = cells.middleCols(t * batch, batch);
    c = g.topRows(h).cwiseProduct(g.bottomRows(h));
    if (t > 0) c += g.middleRows(h, h).cwiseProduct(cells.middleCols((t - 1) * batch, batch));
    hidden.middleCols(t * batch, batch) = (g.middleRows(2 * h, h).array() * tanh_array(c.array())).matrix();
  }

  if (tape) {
    tape->inputs = inputs;
    tape->index.assign(index.begin(), index.end());
    tape->steps = steps;
    tape->batch = batch;
    tape->gates = std::move(gates);
    tape->cells = std::move(cells);
    tape->hidden = hidden;
  }
  return hidden;
}

Matrix Lstm::backward(const Tape& tape, const Matrix& d_hidden, bool want_input_grad) {
  const Eigen::Index h = hidden_dim();
  const Eigen::Index batch = tape.batch;
  const Eigen::Index steps = tape.steps;
  const Eigen::Index total = steps * batch;

  Matrix d_gates(4 * h, total);
  Matrix dh_next = Matrix::Zero(h, batch);
  Matrix dc_next = Matrix::Zero(h, batch);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto g = tape.gates.middleCols(t * batch, batch);
    const auto i_gate = g.topRows(h).array();
    const auto f_gate = g.middleRows(h, h).array();
    const auto o_gate = g.middleRows(2 * h, h).array();
    const auto cand = g.bottomRows(h).array();
    const Eigen::ArrayXXd tanh_c = tanh_array(tape.cells.middleCols(t * batch, batch).array());

    Eigen::ArrayXXd dh = d_hidden.middleCols(t * batch, batch).array() + dh_next.array();
    Eigen::ArrayXXd dc = dh * o_gate * (1.0 - tanh_c.square()) + dc_next.array();

    auto dg = d_gates.middleCols(t * batch, batch);
    dg.topRows(h) = (dc * cand * i_gate * (1.0 - i_gate)).matrix();
    if (t > 0) {
      const auto c_prev = tape.cells.middleCols((t - 1) * batch, batch).array();
      dg.middleRows(h, h) = (dc * c_prev * f_gate * (1.0 - f_gate)).matrix();
    } else {
      dg.middleRows(h, h).setZero();
    }
    dg.middleRows(2 * h, h) = (dh * tanh_c * o_gate * (1.0 - o_gate)).matrix();
    dg.bottomRows(h) = (dc * i_gate * (1.0 - cand.square())).matrix();

    dc_next = (dc * f_gate).matrix();
    dh_next.noalias() = wh_->value.transpose() * dg;
  }

  b_->grad.col(0) += d_gates.rowwise().sum();
  if (steps > 1) {
    wh_->grad.noalias() += d_gates.rightCols(total - batch) *
                           tape.hidden.leftCols(total - batch).transpose();
  }

  Matrix d_projected;
  if (tape.index.empty()) {
    d_projected = std::move(d_gates);
  } else {
    d_projected = Matrix::Zero(4 * h, tape.inputs.cols());
    for (Eigen::Index j = 0; j < total; ++j)
      d_projected.col(tape.index[static_cast<std::size_t>(j)]) += d_gates.col(j);
  }
  wx_->grad.noalias() += d_projected * tape.inputs.transpose();
  if (!want_input_grad) return {};
  return wx_->value.transpose() * d_projected;
}

}  // namespace numeracy::nn
