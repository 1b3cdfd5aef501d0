#pragma once

#include <span>

#include "numeracy/nn/params.hpp"

namespace numeracy::nn {

/// Column-wise softmax, numerically stabilised by the column max.
Matrix softmax(const Matrix& logits);

/// Mean negative log-likelihood of `labels` under softmax(logits), where
/// logits is C x B. Writes dL/dlogits when `grad` is non-null.
double softmax_nll(const Matrix& logits, std::span<const int> labels, Matrix* grad);

/// Mean of (pred - target)^2 over a 1 x B prediction row.
double mse(const Matrix& pred, std::span<const double> targets, Matrix* grad);

}  // namespace numeracy::nn
