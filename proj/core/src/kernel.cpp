#include "smoothqr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smoothqr/errors.hpp"

namespace smoothqr {

namespace {

void require_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("quantile level must lie in (0, 1), got " + std::to_string(tau));
  }
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// E|a + Z| for Z ~ K. The logistic kernel is handled by the caller.
double mean_abs_shift(Kernel kernel, double a) {
  const double abs_a = std::abs(a);
  switch (kernel) {
    case Kernel::gaussian: {
      const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
      return a * (2.0 * kernel_cdf(Kernel::gaussian, a) - 1.0) + 2.0 * pdf;
    }
    case Kernel::uniform:
      return abs_a <= 1.0 ? 0.5 * (a * a + 1.0) : abs_a;
    case Kernel::epanechnikov: {
      if (abs_a > 1.0) return abs_a;
      const double a2 = a * a;
      return 0.75 * a2 - 0.125 * a2 * a2 + 0.375;
    }
    case Kernel::triangular:
      return abs_a <= 1.0 ? a * a - abs_a * abs_a * abs_a / 3.0 + 1.0 / 3.0 : abs_a;
    case Kernel::logistic:
      return 2.0 * softplus(a) - a;
  }
  return abs_a;
}

}  // namespace

std::string_view to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::uniform: return "uniform";
    case Kernel::gaussian: return "gaussian";
    case Kernel::logistic: return "logistic";
    case Kernel::epanechnikov: return "epanechnikov";
    case Kernel::triangular: return "triangular";
  }
  return "unknown";
}

Kernel parse_kernel(std::string_view name) {
  for (Kernel k : kAllKernels) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown kernel '" + std::string(name) +
                    "' (expected uniform, gaussian, logistic, epanechnikov or triangular)");
}

SmoothingSpec::SmoothingSpec(double tau, double bandwidth, Kernel kernel)
    : tau_(tau), bandwidth_(bandwidth), kernel_(kernel) {
  require_tau(tau);
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw DomainError("bandwidth must be positive and finite, got " + std::to_string(bandwidth));
  }
}

double kernel_density(Kernel kernel, double x) {
  const double ax = std::abs(x);
  switch (kernel) {
    case Kernel::uniform: return ax <= 1.0 ? 0.5 : 0.0;
    case Kernel::gaussian: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case Kernel::logistic: {
      const double e = std::exp(-ax);
      return e / ((1.0 + e) * (1.0 + e));
    }
    case Kernel::epanechnikov: return ax <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
    case Kernel::triangular: return ax <= 1.0 ? 1.0 - ax : 0.0;
  }
  return 0.0;
}

double kernel_cdf(Kernel kernel, double x) {
  switch (kernel) {
    case Kernel::uniform:
      return std::clamp(0.5 * (x + 1.0), 0.0, 1.0);
    case Kernel::gaussian:
      return 0.5 * std::erfc(-x / std::numbers::sqrt2);
    case Kernel::logistic:
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      else {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
    case Kernel::epanechnikov:
      if (x <= -1.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return 0.5 + 0.75 * x - 0.25 * x * x * x;
    case Kernel::triangular:
      if (x <= -1.0) return 0.0;
      if (x >= 1.0) return 1.0;
      if (x <= 0.0) return 0.5 * (1.0 + x) * (1.0 + x);
      return 1.0 - 0.5 * (1.0 - x) * (1.0 - x);
  }
  return 0.5;
}

double kernel_mean_abs(Kernel kernel) { return mean_abs_shift(kernel, 0.0); }

double check_loss(double u, double tau) {
  require_tau(tau);
  return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

double smoothed_loss(double u, const SmoothingSpec& spec) {
  const double h = spec.bandwidth();
  const double tau = spec.tau();
  if (spec.kernel() == Kernel::logistic) {
    return (tau - 1.0) * u + h * softplus(u / h);
  }
  // rho_tau(v) = |v|/2 + (tau - 1/2) v, and the kernel has mean zero.
  return (tau - 0.5) * u + 0.5 * h * mean_abs_shift(spec.kernel(), u / h);
}

double smoothed_loss_derivative(double u, const SmoothingSpec& spec) {
  return kernel_cdf(spec.kernel(), u / spec.bandwidth()) - (1.0 - spec.tau());
}

LossPoint smoothed_loss_point(double u, const SmoothingSpec& spec) {
  const double h = spec.bandwidth();
  const double tau = spec.tau();
  const double a = u / h;
  const double cdf = kernel_cdf(spec.kernel(), a);
  const double derivative = cdf - (1.0 - tau);
  if (spec.kernel() == Kernel::gaussian) {
    const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    return {(tau - 0.5) * u + 0.5 * h * (a * (2.0 * cdf - 1.0) + 2.0 * pdf), derivative};
  }
  return {smoothed_loss(u, spec), derivative};
}

double default_bandwidth(long n, long p, double tau) {
  require_tau(tau);
  if (n < 2 || p < 1) {
    throw DomainError("default bandwidth needs n >= 2 and p >= 1");
  }
  const double rate = std::pow(std::log(static_cast<double>(p)) / static_cast<double>(n), 0.25);
  return std::max(0.05, std::sqrt(tau * (1.0 - tau)) * rate);
}

}  // namespace smoothqr
