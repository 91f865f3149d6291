#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "smoothqr/dataset.hpp"
#include "smoothqr/kernel.hpp"
#include "smoothqr/lamm.hpp"
#include "smoothqr/penalty.hpp"

namespace smoothqr {

enum class Correlation { ar1, block_exchangeable };
enum class CoefficientPattern { sparse, dense, grouped };
enum class Noise { normal, student_t };

std::string_view to_string(CoefficientPattern pattern);
std::string_view to_string(Noise noise);
CoefficientPattern parse_pattern(std::string_view name);  // sparse | dense | grouped
Noise parse_noise(std::string_view name);                 // normal | t

/// Heteroscedastic linear model
///   y_i = x_i^T beta* + (0.5 x_{i,p+1} + 1) (eps_i - F_eps^{-1}(tau)),
/// with x_i = (1, x~_i), x~_i ~ N_p(0, Sigma).
struct SimDesign {
  Eigen::Index n = 500;
  Eigen::Index p = 250;
  Correlation correlation = Correlation::ar1;  // AR(1) rate 0.7, or 0.6 exchangeable blocks
  CoefficientPattern pattern = CoefficientPattern::sparse;
  Noise noise = Noise::normal;  // N(0, variance 2) or t with 1.5 df
  double tau = 0.5;
  std::uint64_t seed = 1;

  /// The usual pairing: grouped coefficients on block-exchangeable covariates,
  /// the other patterns on AR(1).
  static SimDesign standard(CoefficientPattern pattern, Noise noise, Eigen::Index n,
                            Eigen::Index p, double tau, std::uint64_t seed);
};

inline constexpr double kStudentDf = 1.5;
inline constexpr double kNormalVariance = 2.0;

/// Block sizes 5, 5, 10, 10, 10 followed by ten blocks of (p - 40) / 10.
/// Throws DimensionError unless p > 40 and p is a multiple of 10.
std::vector<Eigen::Index> grouped_block_sizes(Eigen::Index p);

/// beta* (length p + 1, intercept first) for a pattern.
Vector true_coefficients(CoefficientPattern pattern, Eigen::Index p);

/// Covariance of x~ for a design.
Eigen::MatrixXd design_covariance(const SimDesign& design);

/// tau-quantile of the noise distribution.
double noise_quantile(Noise noise, double tau);

/// Student-t quantile for real df > 0: bisection on the CDF written through
/// the regularized incomplete beta function. Throws DomainError for tau
/// outside (0, 1).
double t_quantile(double tau, double df);

struct SimulatedData {
  Dataset data;
  Vector beta_star;
  /// Present for the grouped pattern.
  std::optional<GroupStructure> groups;
};

/// Draws one data set. Per row: p standard normals (mapped through the
/// Cholesky factor of Sigma), then one noise draw.
SimulatedData generate(const SimDesign& design);

struct Metrics {
  double l2_error = 0.0;  // over all coordinates, intercept included
  std::optional<double> tpr;  // absent when beta* has no non-intercept nonzeros
  std::optional<double> fpr;  // absent when beta* has no non-intercept zeros
  std::optional<double> group_tpr;
  std::optional<double> group_fpr;
};

/// Support recovery over the non-intercept coordinates; a coordinate counts
/// as nonzero iff it is not exactly 0. Group rates need `groups`.
Metrics compute_metrics(const Eigen::Ref<const Vector>& beta_hat,
                        const Eigen::Ref<const Vector>& beta_star,
                        const std::optional<GroupStructure>& groups = std::nullopt);

/// Fitting procedure applied to each replication: penalized smoothed QR with
/// lambda chosen by k-fold CV over a geometric path from lambda_max.
struct MethodSpec {
  PenaltyKind penalty = PenaltyKind::lasso;
  double alpha = 1.0;  // elastic net only
  Kernel kernel = Kernel::gaussian;
  std::optional<double> bandwidth;  // default rule when absent
  int folds = 10;
  int nlambda = 50;
  double lambda_min_ratio = 0.01;
  SolverConfig solver;
  SparseGroupProx sparse_group_prox = SparseGroupProx::exact;
};

struct ReplicationOutcome {
  Metrics metrics;
  double selected_lambda = 0.0;
  double bandwidth = 0.0;
  double seconds = 0.0;  // wall time of the CV fit
};

/// Mean and standard error (sample SD / sqrt(count)) of one metric; the error
/// is absent for a single value, and the whole summary absent when no
/// replication defines the metric.
struct Summary {
  double mean = 0.0;
  std::optional<double> standard_error;
  int count = 0;
};

struct ReplicationReport {
  std::vector<ReplicationOutcome> outcomes;
  Summary l2_error;
  std::optional<Summary> tpr;
  std::optional<Summary> fpr;
  std::optional<Summary> group_tpr;
  std::optional<Summary> group_fpr;
  Summary seconds;
};

/// Fits one data set with `method`, CV folds seeded by `cv_seed`.
ReplicationOutcome run_method(const SimulatedData& sim, const SimDesign& design,
                              const MethodSpec& method, std::uint64_t cv_seed);

/// Independent replications. Replication r draws its data from substream 2r
/// of the master seed and its folds from substream 2r + 1. Replications run
/// on up to `threads` workers; aggregates do not depend on the thread count.
ReplicationReport run_replications(const SimDesign& design, const MethodSpec& method, int reps,
                                   std::uint64_t seed, int threads = 1);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

Summary summarize(std::span<const double> values);

}  // namespace smoothqr
