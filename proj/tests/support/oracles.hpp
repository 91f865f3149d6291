#pragma once

// Test-only oracles. Nothing here calls into the solver or prox code it is
// used to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "smoothqr/dataset.hpp"
#include "smoothqr/kernel.hpp"
#include "smoothqr/objective.hpp"
#include "smoothqr/penalty.hpp"
#include "smoothqr/rng.hpp"

namespace smoothqr::testing {

inline double ref_check(double v, double tau) { return v >= 0 ? tau * v : (tau - 1.0) * v; }

inline double ref_density(Kernel k, double x) {
  const double ax = std::abs(x);
  switch (k) {
    case Kernel::uniform: return ax <= 1 ? 0.5 : 0.0;
    case Kernel::gaussian: return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
    case Kernel::logistic: return 1.0 / (2.0 + std::exp(x) + std::exp(-x));
    case Kernel::epanechnikov: return ax <= 1 ? 0.75 * (1 - x * x) : 0.0;
    case Kernel::triangular: return ax <= 1 ? 1 - ax : 0.0;
  }
  return 0.0;
}

/// Adaptive Gauss-Kronrod quadrature of (1/h) int rho_tau(v) K((v-u)/h) dv,
/// written as int rho_tau(u + h z) K(z) dz and split at every kink. Unbounded
/// kernels are cut where the remaining tail is below 1e-16.
inline double quadrature_smoothed_loss(double u, double tau, double h, Kernel k) {
  using boost::math::quadrature::gauss_kronrod;
  double reach = 1.0;
  if (k == Kernel::gaussian) reach = 40.0;
  if (k == Kernel::logistic) reach = 60.0;
  std::vector<double> pts{-reach, reach, 0.0};
  const double kink = -u / h;
  if (kink > -reach && kink < reach) pts.push_back(kink);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto f = [&](double z) { return ref_check(u + h * z, tau) * ref_density(k, z); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1], 15, 1e-14);
  }
  return total;
}

/// Student-t CDF by quadrature of the density (independent of incomplete
/// beta routines).
inline double quadrature_t_cdf(double t, double df) {
  using boost::math::quadrature::gauss_kronrod;
  const double c = std::exp(std::lgamma(0.5 * (df + 1)) - std::lgamma(0.5 * df)) /
                   std::sqrt(df * std::numbers::pi);
  auto density = [&](double x) { return c * std::pow(1 + x * x / df, -0.5 * (df + 1)); };
  const double half = gauss_kronrod<double, 61>::integrate(density, 0.0, std::abs(t), 12, 1e-13);
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

/// Dense random design with an intercept column and y = X b + noise.
inline Dataset random_dataset(Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                              double noise_scale = 1.0, double signal = 1.0) {
  CounterRng rng(seed);
  RowMajorMatrix x(n, d);
  x.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 1; j < d; ++j) x(i, j) = rng.normal();
  Vector b(d);
  for (Eigen::Index j = 0; j < d; ++j) b(j) = signal * rng.normal();
  Vector y = x * b;
  for (Eigen::Index i = 0; i < n; ++i) y(i) += noise_scale * rng.normal();
  return Dataset::dense(std::move(y), std::move(x));
}

inline double max_kernel_density(Kernel k) {
  switch (k) {
    case Kernel::uniform: return 0.5;
    case Kernel::gaussian: return 1.0 / std::sqrt(2 * std::numbers::pi);
    case Kernel::logistic: return 0.25;
    case Kernel::epanechnikov: return 0.75;
    case Kernel::triangular: return 1.0;
  }
  return 1.0;
}

inline double ref_soft(double a, double b) { return a > b ? a - b : (a < -b ? a + b : 0.0); }

/// Penalty description for the reference solver.
struct RefPenalty {
  enum Kind { lasso, elastic_net, group } kind = lasso;
  double lambda = 0.0;
  double alpha = 1.0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;  // (start, size)
  std::vector<double> weights;
};

inline double ref_penalty_value(const Vector& b, const RefPenalty& p) {
  const Eigen::Index d = b.size();
  double s = 0.0;
  switch (p.kind) {
    case RefPenalty::lasso:
      for (Eigen::Index j = 1; j < d; ++j) s += p.lambda * std::abs(b(j));
      break;
    case RefPenalty::elastic_net:
      for (Eigen::Index j = 1; j < d; ++j)
        s += p.lambda * p.alpha * std::abs(b(j)) + p.lambda * (1 - p.alpha) * b(j) * b(j);
      break;
    case RefPenalty::group:
      for (std::size_t g = 0; g < p.groups.size(); ++g)
        s += p.lambda * p.weights[g] * b.segment(p.groups[g].first, p.groups[g].second).norm();
      break;
  }
  return s;
}

/// Proximal gradient with the fixed step 1/L, L = ||X||_F^2 max K / (n h),
/// run until the objective stalls. Its own prox and loop; only the scalar
/// loss and derivative are shared with the library.
inline Vector reference_prox_gradient(const Dataset& data, const SmoothingSpec& spec,
                                      const RefPenalty& pen, RowMajorMatrix x,
                                      int max_iter = 2000000) {
  const double n = static_cast<double>(data.n());
  const double lipschitz = x.squaredNorm() * max_kernel_density(spec.kernel()) /
                           (n * spec.bandwidth());
  const double step = 1.0 / lipschitz;
  const Eigen::Index d = x.cols();
  Vector b = Vector::Zero(d);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Vector r = data.y() - x * b;
    Vector w(r.size());
    // The loss derivative is certified separately by finite differences.
    for (Eigen::Index i = 0; i < r.size(); ++i) w(i) = smoothed_loss_derivative(r(i), spec);
    const Vector g = -(x.transpose() * w) / n;
    Vector u = b - step * g;
    switch (pen.kind) {
      case RefPenalty::lasso:
        for (Eigen::Index j = 1; j < d; ++j) u(j) = ref_soft(u(j), step * pen.lambda);
        break;
      case RefPenalty::elastic_net:
        for (Eigen::Index j = 1; j < d; ++j)
          u(j) = ref_soft(u(j), step * pen.lambda * pen.alpha) /
                 (1 + 2 * step * pen.lambda * (1 - pen.alpha));
        break;
      case RefPenalty::group:
        for (std::size_t gi = 0; gi < pen.groups.size(); ++gi) {
          auto blk = u.segment(pen.groups[gi].first, pen.groups[gi].second);
          const double nrm = blk.norm();
          const double t = step * pen.lambda * pen.weights[gi];
          blk *= nrm > t ? 1 - t / nrm : 0.0;
        }
        break;
    }
    const double obj = mean_smoothed_loss(data.y() - x * u, spec) + ref_penalty_value(u, pen);
    const double move = (u - b).norm();
    b = u;
    if (std::abs(prev - obj) <= 1e-15 && move <= 1e-12) break;
    prev = obj;
  }
  return b;
}


/// Prox problem phi/2 ||b - u||^2 + P(b) restricted to one block of at most
/// two coordinates, where P on the block is
///   l1 * ||b||_1 + l2sq * ||b||_2^2 + grp * ||b||_2.
/// Returns the smallest objective over the square grid of the given step
/// covering [-R, R]^k, R = ||u||_inf rounded up to the step.
inline double grid_block_min(const std::vector<double>& u, double phi, double l1, double l2sq,
                             double grp, double step = 1e-3) {
  auto obj = [&](double b0, double b1) {
    double q = 0.5 * phi * (b0 - u[0]) * (b0 - u[0]);
    double a = std::abs(b0), s = b0 * b0;
    if (u.size() > 1) {
      q += 0.5 * phi * (b1 - u[1]) * (b1 - u[1]);
      a += std::abs(b1);
      s += b1 * b1;
    }
    return q + l1 * a + l2sq * s + grp * std::sqrt(s);
  };
  double r = 0.0;
  for (double v : u) r = std::max(r, std::abs(v));
  const long m = static_cast<long>(std::ceil(r / step)) + 1;
  double best = std::numeric_limits<double>::infinity();
  if (u.size() == 1) {
    for (long i = -m; i <= m; ++i) best = std::min(best, obj(i * step, 0.0));
  } else {
    for (long i = -m; i <= m; ++i)
      for (long j = -m; j <= m; ++j) best = std::min(best, obj(i * step, j * step));
  }
  return best;
}


/// Random prox problem with d <= 4 and every penalized block of size <= 2,
/// together with the block decomposition of its objective.
struct ProxInstance {
  struct Block {
    std::vector<Eigen::Index> coords;
    double l1 = 0.0, l2sq = 0.0, grp = 0.0;
  };
  Vector v, grad;
  double phi = 1.0;
  PenaltySpec spec{WeightedLasso{Vector::Zero(1)}};
  std::vector<Block> blocks;
};

inline ProxInstance random_prox_instance(PenaltyKind kind, CounterRng& rng) {
  ProxInstance inst;
  const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_index(3));  // 2..4
  inst.v.resize(d);
  inst.grad.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    inst.v(j) = rng.normal();
    inst.grad(j) = rng.normal();
  }
  inst.phi = 0.5 + 2 * rng.uniform();
  const double lambda = 0.05 + 1.2 * rng.uniform();
  switch (kind) {
    case PenaltyKind::lasso: {
      Vector l(d);
      l(0) = 0;
      for (Eigen::Index j = 1; j < d; ++j) {
        l(j) = lambda * (0.2 + rng.uniform());
        inst.blocks.push_back({{j}, l(j), 0.0, 0.0});
      }
      inst.spec = WeightedLasso{l};
      break;
    }
    case PenaltyKind::elastic_net: {
      const double alpha = rng.uniform();
      for (Eigen::Index j = 1; j < d; ++j)
        inst.blocks.push_back({{j}, lambda * alpha, lambda * (1 - alpha), 0.0});
      inst.spec = ElasticNet{lambda, alpha};
      break;
    }
    case PenaltyKind::group_lasso:
    case PenaltyKind::sparse_group_lasso: {
      std::vector<Eigen::Index> sizes;
      std::vector<double> weights;
      Eigen::Index left = d - 1, at = 1;
      while (left > 0) {
        const Eigen::Index s = left >= 2 && rng.uniform() < 0.7 ? 2 : 1;
        sizes.push_back(s);
        weights.push_back(0.5 + rng.uniform());
        ProxInstance::Block b;
        for (Eigen::Index c = 0; c < s; ++c) b.coords.push_back(at + c);
        b.grp = lambda * weights.back();
        if (kind == PenaltyKind::sparse_group_lasso) b.l1 = lambda;
        inst.blocks.push_back(b);
        at += s;
        left -= s;
      }
      auto groups = GroupStructure::from_sizes(sizes, weights);
      if (kind == PenaltyKind::group_lasso)
        inst.spec = GroupLasso{lambda, groups};
      else
        inst.spec = SparseGroupLasso{lambda, groups};
      break;
    }
  }
  return inst;
}

/// Prox objective of `beta` for the instance, evaluated block by block.
inline double prox_objective(const ProxInstance& inst, const Vector& beta) {
  const Vector u = inst.v - inst.grad / inst.phi;
  double total = 0.5 * inst.phi * (beta(0) - u(0)) * (beta(0) - u(0));
  for (const auto& b : inst.blocks) {
    double q = 0, a = 0, s = 0;
    for (Eigen::Index c : b.coords) {
      q += 0.5 * inst.phi * (beta(c) - u(c)) * (beta(c) - u(c));
      a += std::abs(beta(c));
      s += beta(c) * beta(c);
    }
    total += q + b.l1 * a + b.l2sq * s + b.grp * std::sqrt(s);
  }
  return total;
}

/// Grid minimum of the instance's prox objective (intercept term is 0 at its
/// unpenalized optimum, so only the blocks are searched).
inline double prox_grid_min(const ProxInstance& inst, double step = 1e-3) {
  const Vector u = inst.v - inst.grad / inst.phi;
  double total = 0.0;
  for (const auto& b : inst.blocks) {
    std::vector<double> ub;
    for (Eigen::Index c : b.coords) ub.push_back(u(c));
    total += grid_block_min(ub, inst.phi, b.l1, b.l2sq, b.grp, step);
  }
  return total;
}

}  // namespace smoothqr::testing
