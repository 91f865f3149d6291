#include "smoothqr/objective.hpp"

#include <string>

#include "smoothqr/errors.hpp"

namespace smoothqr {

namespace {

void require_dim(const Dataset& data, Eigen::Index size) {
  if (size != data.dim()) {
    throw DimensionError("coefficient vector has length " + std::to_string(size) +
                         ", expected " + std::to_string(data.dim()));
  }
}

}  // namespace

Vector residuals(const Dataset& data, const Eigen::Ref<const Vector>& beta) {
  require_dim(data, beta.size());
  Vector fitted;
  data.design().multiply(beta, fitted);
  return data.y() - fitted;
}

double mean_smoothed_loss(const Eigen::Ref<const Vector>& residual, const SmoothingSpec& spec) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) total += smoothed_loss(residual(i), spec);
  return total / static_cast<double>(residual.size());
}

double mean_smoothed_loss(const Eigen::Ref<const Vector>& residual, const SmoothingSpec& spec,
                          Vector& weights) {
  const double inv_n = 1.0 / static_cast<double>(residual.size());
  weights.resize(residual.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    const LossPoint pt = smoothed_loss_point(residual(i), spec);
    total += pt.value;
    weights(i) = -pt.derivative * inv_n;
  }
  return total * inv_n;
}

Vector gradient_from_weights(const Dataset& data, const Eigen::Ref<const Vector>& weights) {
  Vector grad;
  data.design().transpose_multiply(weights, grad);
  return grad;
}

double mean_check_loss(const Eigen::Ref<const Vector>& residual, double tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) total += check_loss(residual(i), tau);
  return total / static_cast<double>(residual.size());
}

Vector gradient_from_residuals(const Dataset& data, const Eigen::Ref<const Vector>& residual,
                               const SmoothingSpec& spec) {
  // K̄(-r/h) - tau = -l'(r) for the symmetric kernels used here.
  const double inv_n = 1.0 / static_cast<double>(residual.size());
  Vector weights(residual.size());
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    weights(i) = -smoothed_loss_derivative(residual(i), spec) * inv_n;
  }
  return gradient_from_weights(data, weights);
}

double loss_value(const Dataset& data, const Eigen::Ref<const Vector>& beta,
                  const SmoothingSpec& spec) {
  return mean_smoothed_loss(residuals(data, beta), spec);
}

Vector gradient(const Dataset& data, const Eigen::Ref<const Vector>& beta,
                const SmoothingSpec& spec) {
  return gradient_from_residuals(data, residuals(data, beta), spec);
}

double check_loss_total(const Dataset& data, const Eigen::Ref<const Vector>& beta, double tau) {
  return mean_check_loss(residuals(data, beta), tau);
}

}  // namespace smoothqr
