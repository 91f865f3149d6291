#pragma once

#include "smoothqr/dataset.hpp"
#include "smoothqr/kernel.hpp"

namespace smoothqr {

/// Residuals y - X beta.
Vector residuals(const Dataset& data, const Eigen::Ref<const Vector>& beta);

/// Q(beta) = (1/n) sum_i l_{h,tau}(y_i - x_i^T beta).
double loss_value(const Dataset& data, const Eigen::Ref<const Vector>& beta,
                  const SmoothingSpec& spec);

/// (1/n) sum_i x_i [K̄(-r_i/h) - tau].
Vector gradient(const Dataset& data, const Eigen::Ref<const Vector>& beta,
                const SmoothingSpec& spec);

/// (1/n) sum_i rho_tau(y_i - x_i^T beta); the unsmoothed validation loss.
double check_loss_total(const Dataset& data, const Eigen::Ref<const Vector>& beta, double tau);

/// Residual-level building blocks shared by the solver, which evaluates the
/// loss and gradient at the same point from one multiply.
double mean_smoothed_loss(const Eigen::Ref<const Vector>& residual, const SmoothingSpec& spec);
/// Same value; also stores the gradient weights -l'(r_i) / n in `weights`,
/// so the gradient at these residuals is gradient_from_weights(data, weights).
double mean_smoothed_loss(const Eigen::Ref<const Vector>& residual, const SmoothingSpec& spec,
                          Vector& weights);
Vector gradient_from_weights(const Dataset& data, const Eigen::Ref<const Vector>& weights);
double mean_check_loss(const Eigen::Ref<const Vector>& residual, double tau);
Vector gradient_from_residuals(const Dataset& data, const Eigen::Ref<const Vector>& residual,
                               const SmoothingSpec& spec);

}  // namespace smoothqr
