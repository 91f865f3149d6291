#pragma once

#include <optional>
#include <vector>

#include "smoothqr/dataset.hpp"
#include "smoothqr/kernel.hpp"
#include "smoothqr/penalty.hpp"

namespace smoothqr {

/// Parameters of the local adaptive majorize-minimization loop.
struct SolverConfig {
  double phi0 = 0.01;     // smallest quadratic coefficient
  double gamma = 1.2;     // inflation factor
  double epsilon = 1e-4;  // stop when ||beta^k - beta^{k-1}||_2 <= epsilon
  int max_iter = 5000;
  int max_inflate = 200;  // inflation steps allowed within one iteration

  /// Throws DomainError unless phi0 > 0, gamma > 1, epsilon > 0 and the caps
  /// are positive.
  void validate() const;
};

struct FitResult {
  Vector beta;
  int iterations = 0;
  /// Q + P at beta^0, beta^1, ..., beta^iterations (accepted iterates only).
  std::vector<double> objective_trace;
  /// F(beta^k | phi_k, beta^{k-1}) - Q(beta^k) for k = 1..iterations; never
  /// negative.
  std::vector<double> majorization_margin;
  bool converged = false;
  double final_phi = 0.0;
};

/// Isotropic quadratic surrogate
/// q_anchor + <grad_anchor, beta - anchor> + phi/2 ||beta - anchor||^2.
double surrogate_value(const Eigen::Ref<const Vector>& beta, const Eigen::Ref<const Vector>& anchor,
                       double phi, double q_anchor, const Eigen::Ref<const Vector>& grad_anchor);

/// Minimizes Q(beta) + P(beta). Starts from `init` or zero.
///
/// Each iteration deflates phi by gamma (never below phi0), takes the proximal
/// step from the current anchor and inflates phi by gamma until the surrogate
/// majorizes Q at the candidate. Throws SolverError when the objective turns
/// non-finite or the inflation cap is hit.
FitResult lamm_fit(const Dataset& data, const SmoothingSpec& spec, const PenaltySpec& penalty,
                   const SolverConfig& config = {},
                   const std::optional<Vector>& init = std::nullopt);

/// Largest distance from -grad Q(beta) to the subdifferential of P at beta,
/// over the intercept, the penalized coordinates and (for group penalties)
/// the groups.
double kkt_residual(const Dataset& data, const Eigen::Ref<const Vector>& beta,
                    const SmoothingSpec& spec, const PenaltySpec& penalty);

}  // namespace smoothqr
