#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "smoothqr/dataset.hpp"
#include "smoothqr/kernel.hpp"
#include "smoothqr/lamm.hpp"

namespace smoothqr {

/// theta = P^T T z: T is the lower-triangular all-ones matrix (cumulative sum)
/// and P sorts one covariate ascending. Column 0 of the operator is all ones,
/// so z_0 plays the intercept role. Both products cost O(n).
class CumsumDesign final : public DesignView {
 public:
  /// `order[k]` is the row holding the k-th smallest covariate value.
  explicit CumsumDesign(std::vector<Eigen::Index> order);

  Eigen::Index rows() const override { return static_cast<Eigen::Index>(order_.size()); }
  Eigen::Index cols() const override { return static_cast<Eigen::Index>(order_.size()); }
  void multiply(const Eigen::Ref<const Vector>& z, Vector& out) const override;
  void transpose_multiply(const Eigen::Ref<const Vector>& v, Vector& out) const override;

  const std::vector<Eigen::Index>& order() const noexcept { return order_; }

 private:
  std::vector<Eigen::Index> order_;
};

struct FusedDesign {
  std::vector<Eigen::Index> order;  // stable ascending sort permutation
  std::shared_ptr<const CumsumDesign> design;
};

/// Sort permutation of `x` (stable for ties) and the matching cumulative-sum
/// operator. The fused penalty ||D P theta||_1 equals sum_{i>=1} |z_i|.
FusedDesign difference_design(const Eigen::Ref<const Vector>& x);

/// Difference coordinates of theta: z_0 = smallest-x value, z_i the jump
/// between consecutive sorted positions.
Vector to_differences(const Eigen::Ref<const Vector>& theta, const std::vector<Eigen::Index>& order);
Vector from_differences(const Eigen::Ref<const Vector>& z, const std::vector<Eigen::Index>& order);

/// sum over consecutive sorted positions of |theta_(i+1) - theta_(i)|.
double fused_penalty(const Eigen::Ref<const Vector>& theta, const std::vector<Eigen::Index>& order);

/// argmin_theta (1/n) sum_i l_{h,tau}(r_i - theta_i) + lambda ||D P theta||_1,
/// solved as a weighted lasso in difference coordinates with weights
/// (0, lambda, ..., lambda), warm-started from `warm` when given.
Vector solve_fused_block(const Eigen::Ref<const Vector>& residual, const FusedDesign& design,
                         double lambda, const SmoothingSpec& spec, const SolverConfig& config,
                         const std::optional<Vector>& warm = std::nullopt);

struct FlamConfig {
  double epsilon = 1e-4;  // on |d theta0| + sum_j ||d theta_j||_2 per cycle
  int max_cycles = 1000;
  SolverConfig block;     // block epsilon is replaced by epsilon / p
};

struct FlamFit {
  double theta0 = 0.0;
  /// n x p; column j holds theta_j at the training rows.
  Eigen::MatrixXd theta;
  /// Per covariate: training values sorted ascending and theta in that order.
  std::vector<Vector> sorted_x;
  std::vector<Vector> sorted_theta;
  /// Per covariate: stable ascending sort permutation of the training rows.
  std::vector<std::vector<Eigen::Index>> order;
  double lambda = 0.0;
  SmoothingSpec spec{0.5, 1.0};
  int cycles = 0;
  /// Full objective after each completed cycle, starting with the all-zero fit.
  std::vector<double> objective_trace;
  bool converged = false;
};

/// Block coordinate descent over the covariates of `x` (n x p, no intercept
/// column). Throws SolverError when max_cycles pass without convergence.
FlamFit fit_flam(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const RowMajorMatrix>& x,
                 double lambda, const SmoothingSpec& spec, const FlamConfig& config = {});

/// (1/n) sum_i l_{h,tau}(y_i - theta0 - sum_j theta_ij) + lambda sum_j ||D P_j theta_j||_1.
double flam_objective(const Eigen::Ref<const Vector>& y, const FlamFit& fit);

/// theta0 + sum_j f_j(x_j), where f_j takes the value of the closest training
/// point at or below x_j (the last one among ties), clamped to the training
/// range. Throws DomainError on non-finite input.
double predict_flam(const FlamFit& fit, const Eigen::Ref<const Vector>& x_new);

}  // namespace smoothqr
