#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace numeracy::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A named trainable tensor with its gradient and Adam moments.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;
};

/// Owns parameters at stable addresses; layers keep `Param*` into it.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  Param& add(std::string name, Eigen::Index rows, Eigen::Index cols);

  std::deque<Param>& params() { return params_; }
  const std::deque<Param>& params() const { return params_; }
  const Param* find(const std::string& name) const;

  /// Total number of scalars.
  std::size_t scalar_count() const;
  void zero_grad();
  bool all_finite() const;

  std::vector<Matrix> snapshot() const;
  void restore(const std::vector<Matrix>& values);

  std::int64_t adam_steps = 0;

 private:
  std::deque<Param> params_;
};

/// Xavier/Glorot uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
void xavier_uniform(Matrix& m, double fan_in, double fan_out, std::uint64_t seed);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update over every parameter in the store.
/// Moments persist in the store; gradients are zeroed afterwards.
void adam_step(ParamStore& store, const AdamConfig& config);

}  // namespace numeracy::nn
