#include "numeracy/nn/params.hpp"

#include <cmath>

#include "numeracy/errors.hpp"
#include "numeracy/random.hpp"

namespace numeracy::nn {

Param& ParamStore::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  for (const auto& p : params_)
    if (p.name == name) throw Error("duplicate parameter name '" + name + "'");
  Param& p = params_.emplace_back();
  p.name = std::move(name);
  p.value = Matrix::Zero(rows, cols);
  p.grad = Matrix::Zero(rows, cols);
  p.m = Matrix::Zero(rows, cols);
  p.v = Matrix::Zero(rows, cols);
  return p;
}

const Param* ParamStore::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

bool ParamStore::all_finite() const {
  for (const auto& p : params_)
    if (!p.value.allFinite()) return false;
  return true;
}

std::vector<Matrix> ParamStore::snapshot() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.value);
  return out;
}

void ParamStore::restore(const std::vector<Matrix>& values) {
  if (values.size() != params_.size()) throw Error("snapshot does not match parameter store");
  for (std::size_t i = 0; i < values.size(); ++i) params_[i].value = values[i];
}

void xavier_uniform(Matrix& m, double fan_in, double fan_out, std::uint64_t seed) {
  Rng rng(seed);
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-a, a);
}

void adam_step(ParamStore& store, const AdamConfig& config) {
  store.adam_steps += 1;
  const double t = static_cast<double>(store.adam_steps);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (auto& p : store.params()) {
    p.m = config.beta1 * p.m + (1.0 - config.beta1) * p.grad;
    p.v = config.beta2 * p.v + (1.0 - config.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= config.lr * (p.m.array() / c1) /
                       ((p.v.array() / c2).sqrt() + config.eps);
    p.grad.setZero();
  }
}

}  // namespace numeracy::nn
