#include "numeracy/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace numeracy::nn {

GradcheckResult gradcheck(std::span<ParamStore* const> stores, const std::function<double()>& loss,
                          const std::function<void()>& accumulate, double epsilon) {
  for (auto* s : stores) s->zero_grad();
  accumulate();
  GradcheckResult result;
  for (auto* s : stores) {
    for (auto& p : s->params()) {
      for (Eigen::Index i = 0; i < p.value.size(); ++i) {
        double& x = p.value.data()[i];
        const double saved = x;
        x = saved + epsilon;
        const double up = loss();
        x = saved - epsilon;
        const double down = loss();
        x = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double analytic = p.grad.data()[i];
        const double denom = std::max(std::abs(analytic) + std::abs(numeric), kGradcheckFloor);
        const double rel = std::abs(analytic - numeric) / denom;
        if (rel > result.max_relative_error) {
          result.max_relative_error = rel;
          result.worst_param = p.name;
        }
        ++result.checked;
      }
    }
  }
  for (auto* s : stores) s->zero_grad();
  return result;
}

}  // namespace numeracy::nn
