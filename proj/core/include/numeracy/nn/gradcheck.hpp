#pragma once

#include <functional>
#include <span>

#include "numeracy/nn/params.hpp"

namespace numeracy::nn {

inline constexpr double kGradcheckEpsilon = 1e-5;
/// Denominator floor: |a - n| / max(|a| + |n|, floor). Keeps entries whose
/// true gradient is ~0 from reporting pure rounding noise as relative error.
inline constexpr double kGradcheckFloor = 1e-6;

struct GradcheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::string worst_param;
};

/// Compares analytic gradients with central differences for every scalar
/// in `stores`. `loss` evaluates the loss without touching gradients;
/// `accumulate` zeroes nothing and adds analytic gradients into the stores
/// (they are zeroed here first).
GradcheckResult gradcheck(std::span<ParamStore* const> stores, const std::function<double()>& loss,
                          const std::function<void()>& accumulate, double epsilon = kGradcheckEpsilon);

}  // namespace numeracy::nn
