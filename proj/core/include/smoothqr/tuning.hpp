#pragma once

#include <cstdint>
#include <vector>

#include "smoothqr/dataset.hpp"
#include "smoothqr/kernel.hpp"
#include "smoothqr/lamm.hpp"
#include "smoothqr/penalty.hpp"

namespace smoothqr {

/// Strictly decreasing, geometrically spaced regularization levels.
class LambdaPath {
 public:
  /// Throws DomainError unless values are positive and strictly decreasing.
  explicit LambdaPath(std::vector<double> values);

  /// `count` levels from lambda_max down to min_ratio * lambda_max.
  static LambdaPath geometric(double lambda_max, double min_ratio = 0.01, int count = 50);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Intercept-only smoothed quantile fit: beta = (b, 0, ..., 0) with b solving
/// mean K̄((y_i - b)/h) = 1 - tau, found by bisection to machine precision.
Vector intercept_only_fit(const Dataset& data, const SmoothingSpec& spec);

/// Smallest multiple of the unit penalty `unit` whose solution has every
/// non-intercept coefficient at zero. Computed from the gradient at the
/// intercept-only fit:
///   weighted lasso   max_j |g_j| / w_j          (w_j > 0)
///   elastic net      max_j |g_j| / alpha        (alpha = 0 uses alpha = 1)
///   group lasso      max_g ||g_g|| / w_g
///   sparse group     max_g of the root of ||S(g_g, l)|| = l w_g
/// The result is nudged up by a relative 1e-10 so the zero solution survives
/// rounding. A constant response is degenerate: 1.0 is returned and a warning
/// printed to stderr.
double lambda_max(const Dataset& data, const SmoothingSpec& spec, const PenaltySpec& unit);

/// Fits every level of `path` in order, warm-starting each fit from the
/// previous solution; the first fit starts from the intercept-only solution.
/// Solver failures are rethrown as SolverError naming the path index.
std::vector<FitResult> fit_path(const Dataset& data, const SmoothingSpec& spec,
                                const PenaltySpec& unit, const LambdaPath& path,
                                const SolverConfig& config = {});

/// Seeded partition of 0..n-1 into k contiguous blocks of a Fisher-Yates
/// permutation; block sizes differ by at most one (larger blocks first).
std::vector<std::vector<Eigen::Index>> fold_partition(Eigen::Index n, int k, std::uint64_t seed);

struct CvResult {
  std::vector<double> lambdas;
  std::vector<double> mean_loss;       // mean held-out check loss per level
  std::vector<double> standard_error;  // fold SD / sqrt(k)
  std::size_t selected_index = 0;
  double selected_lambda = 0.0;
  FitResult refit;  // full data, selected level
  std::uint64_t seed = 0;
  int folds = 0;
};

/// k-fold cross-validation of the path, scored by the unsmoothed check loss.
/// Ties go to the larger lambda. Folds run on up to `threads` workers; the
/// result does not depend on the thread count.
CvResult cross_validate(const Dataset& data, const SmoothingSpec& spec, const PenaltySpec& unit,
                        const LambdaPath& path, int folds = 10, std::uint64_t seed = 0,
                        const SolverConfig& config = {}, int threads = 1);

}  // namespace smoothqr
