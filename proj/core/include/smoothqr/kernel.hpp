#pragma once

#include <string>
#include <string_view>

namespace smoothqr {

/// Smoothing kernels. Each density K is symmetric, non-negative and
/// integrates to one.
enum class Kernel { uniform, gaussian, logistic, epanechnikov, triangular };

inline constexpr Kernel kAllKernels[] = {Kernel::uniform, Kernel::gaussian, Kernel::logistic,
                                         Kernel::epanechnikov, Kernel::triangular};

std::string_view to_string(Kernel kernel);

/// Parses "uniform", "gaussian", "logistic", "epanechnikov" or "triangular".
/// Throws ConfigError on anything else.
Kernel parse_kernel(std::string_view name);

/// Quantile level, bandwidth and kernel of the smoothed check loss.
class SmoothingSpec {
 public:
  /// Throws DomainError unless 0 < tau < 1 and h > 0 (finite).
  SmoothingSpec(double tau, double bandwidth, Kernel kernel = Kernel::gaussian);

  double tau() const noexcept { return tau_; }
  double bandwidth() const noexcept { return bandwidth_; }
  Kernel kernel() const noexcept { return kernel_; }

 private:
  double tau_;
  double bandwidth_;
  Kernel kernel_;
};

/// Kernel density K(x).
double kernel_density(Kernel kernel, double x);

/// Kernel distribution function: integral of K over (-inf, x]. Equals 1/2 at 0.
double kernel_cdf(Kernel kernel, double x);

/// E|Z| for Z ~ K; the smoothed loss at zero is h * E|Z| / 2.
double kernel_mean_abs(Kernel kernel);

/// Quantile (check) loss u * (tau - 1{u < 0}). Throws DomainError for tau
/// outside (0,1).
double check_loss(double u, double tau);

/// Convolution-smoothed check loss, evaluated in closed form.
double smoothed_loss(double u, const SmoothingSpec& spec);

/// First derivative of smoothed_loss: K̄(u/h) - (1 - tau).
double smoothed_loss_derivative(double u, const SmoothingSpec& spec);

struct LossPoint {
  double value;
  double derivative;
};

/// smoothed_loss and smoothed_loss_derivative sharing one kernel CDF
/// evaluation.
LossPoint smoothed_loss_point(double u, const SmoothingSpec& spec);

/// Default bandwidth max{0.05, sqrt(tau(1-tau)) * (log(p)/n)^(1/4)}.
/// Requires n >= 2 and p >= 1.
double default_bandwidth(long n, long p, double tau);

}  // namespace smoothqr
