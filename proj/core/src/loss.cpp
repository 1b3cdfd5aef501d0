#include "numeracy/nn/loss.hpp"

#include <cmath>

namespace numeracy::nn {

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double peak = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - peak).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

double softmax_nll(const Matrix& logits, std::span<const int> labels, Matrix* grad) {
  const Eigen::Index batch = logits.cols();
  double loss = 0.0;
  if (grad) grad->resize(logits.rows(), batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const double peak = logits.col(j).maxCoeff();
    const Eigen::ArrayXd shifted = logits.col(j).array() - peak;
    const double log_z = std::log(shifted.exp().sum());
    const int y = labels[static_cast<std::size_t>(j)];
    loss += log_z - shifted(y);
    if (grad) {
      grad->col(j) = (shifted - log_z).exp().matrix();
      (*grad)(y, j) -= 1.0;
    }
  }
  if (grad) *grad /= static_cast<double>(batch);
  return loss / static_cast<double>(batch);
}

double mse(const Matrix& pred, std::span<const double> targets, Matrix* grad) {
  const Eigen::Index batch = pred.cols();
  Eigen::Map<const Eigen::RowVectorXd> t(targets.data(), batch);
  const Eigen::RowVectorXd diff = pred.row(0) - t;
  if (grad) *grad = (2.0 / static_cast<double>(batch)) * diff;
  return diff.squaredNorm() / static_cast<double>(batch);
}

}  // namespace numeracy::nn
