#include "smoothqr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "smoothqr/errors.hpp"
#include "smoothqr/objective.hpp"
#include "smoothqr/rng.hpp"

namespace smoothqr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kLambdaMaxNudge = 1.0 + 1e-10;

// Root of ||S(g, l)||_2 = l * w in l >= 0.
double sparse_group_root(const Eigen::Ref<const Vector>& g, double w) {
  auto excess = [&](double l) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double t = soft_threshold(g(j), l);
      s += t * t;
    }
    return std::sqrt(s) - l * w;
  };
  double lo = 0.0;
  double hi = g.cwiseAbs().maxCoeff();
  if (hi == 0.0) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

LambdaPath::LambdaPath(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("lambda path must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw DomainError("lambda values must be positive and finite");
    }
    if (i > 0 && !(values_[i] < values_[i - 1])) {
      throw DomainError("lambda values must be strictly decreasing");
    }
  }
}

LambdaPath LambdaPath::geometric(double lambda_max, double min_ratio, int count) {
  if (count < 1) throw DomainError("lambda path needs at least one value");
  if (!(min_ratio > 0.0 && min_ratio < 1.0) && count > 1) {
    throw DomainError("lambda-min ratio must lie in (0, 1)");
  }
  std::vector<double> values(static_cast<std::size_t>(count));
  const double log_max = std::log(lambda_max);
  const double log_step = count > 1 ? std::log(min_ratio) / (count - 1) : 0.0;
  values[0] = lambda_max;
  for (int i = 1; i < count; ++i) values[i] = std::exp(log_max + log_step * i);
  return LambdaPath(std::move(values));
}

Vector intercept_only_fit(const Dataset& data, const SmoothingSpec& spec) {
  const Vector& y = data.y();
  const double h = spec.bandwidth();
  const double target = 1.0 - spec.tau();
  auto mean_cdf = [&](double b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) s += kernel_cdf(spec.kernel(), (y(i) - b) / h);
    return s / static_cast<double>(y.size());
  };
  // mean_cdf decreases from ~1 to ~0 across the bracket.
  double lo = y.minCoeff() - 60.0 * h;
  double hi = y.maxCoeff() + 60.0 * h;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (mean_cdf(mid) > target ? lo : hi) = mid;
  }
  Vector beta = Vector::Zero(data.dim());
  beta(0) = 0.5 * (lo + hi);
  return beta;
}

double lambda_max(const Dataset& data, const SmoothingSpec& spec, const PenaltySpec& unit) {
  unit.require_dim(data.dim());
  const Vector& y = data.y();
  if (y.maxCoeff() == y.minCoeff()) {
    std::cerr << "warning: constant response; lambda_max is degenerate, using 1.0\n";
    return 1.0;
  }
  const Vector beta0 = intercept_only_fit(data, spec);
  const Vector g = gradient(data, beta0, spec);
  const Eigen::Index d = data.dim();

  const double value = std::visit(
      overloaded{
          [&](const WeightedLasso& p) {
            double m = 0.0;
            for (Eigen::Index j = 1; j < d; ++j) {
              if (p.lambdas(j) > 0.0 && std::isfinite(p.lambdas(j))) {
                m = std::max(m, std::abs(g(j)) / p.lambdas(j));
              }
            }
            return m;
          },
          [&](const ElasticNet& p) {
            const double m = g.tail(d - 1).cwiseAbs().maxCoeff();
            return p.alpha > 0.0 ? m / p.alpha : m;
          },
          [&](const GroupLasso& p) {
            double m = 0.0;
            for (const Group& grp : p.groups.groups()) {
              m = std::max(m, g.segment(grp.start, grp.size).norm() / grp.weight);
            }
            return m;
          },
          [&](const SparseGroupLasso& p) {
            double m = 0.0;
            for (const Group& grp : p.groups.groups()) {
              m = std::max(m, sparse_group_root(g.segment(grp.start, grp.size), grp.weight));
            }
            return m;
          },
      },
      unit.variant());

  if (!(value > 0.0) || !std::isfinite(value)) {
    std::cerr << "warning: lambda_max is degenerate (" << value << "), using 1.0\n";
    return 1.0;
  }
  return value * kLambdaMaxNudge;
}

std::vector<FitResult> fit_path(const Dataset& data, const SmoothingSpec& spec,
                                const PenaltySpec& unit, const LambdaPath& path,
                                const SolverConfig& config) {
  std::vector<FitResult> fits;
  fits.reserve(path.size());
  Vector warm = intercept_only_fit(data, spec);
  for (std::size_t i = 0; i < path.size(); ++i) {
    try {
      fits.push_back(lamm_fit(data, spec, unit.scaled(path[i]), config, warm));
    } catch (const SolverError& e) {
      throw SolverError("lambda index " + std::to_string(i) + " (lambda = " +
                            std::to_string(path[i]) + "): " + e.what(),
                        e.phi());
    }
    warm = fits.back().beta;
  }
  return fits;
}

std::vector<std::vector<Eigen::Index>> fold_partition(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (n < k) {
    throw ConfigError("cannot split " + std::to_string(n) + " observations into " +
                      std::to_string(k) + " folds");
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  CounterRng rng(seed);
  rng.shuffle(std::span<Eigen::Index>(perm));

  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  const Eigen::Index base = n / k;
  const Eigen::Index extra = n % k;
  Eigen::Index pos = 0;
  for (Eigen::Index f = 0; f < k; ++f) {
    const Eigen::Index size = base + (f < extra ? 1 : 0);
    folds[static_cast<std::size_t>(f)].assign(perm.begin() + pos, perm.begin() + pos + size);
    pos += size;
  }
  return folds;
}

CvResult cross_validate(const Dataset& data, const SmoothingSpec& spec, const PenaltySpec& unit,
                        const LambdaPath& path, int folds, std::uint64_t seed,
                        const SolverConfig& config, int threads) {
  const auto partition = fold_partition(data.n(), folds, seed);
  for (const auto& fold : partition) {
    if (data.n() - static_cast<Eigen::Index>(fold.size()) < 2) {
      throw ConfigError("a training split would hold fewer than 2 observations");
    }
  }

  const std::size_t k = partition.size();
  const std::size_t levels = path.size();
  std::vector<std::vector<double>> fold_loss(k, std::vector<double>(levels, 0.0));

  detail::parallel_for(k, threads, [&](std::size_t f) {
    std::vector<bool> held(static_cast<std::size_t>(data.n()), false);
    for (Eigen::Index i : partition[f]) held[static_cast<std::size_t>(i)] = true;
    std::vector<Eigen::Index> train;
    train.reserve(static_cast<std::size_t>(data.n()));
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      if (!held[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    const Dataset train_data = data.subset(train);
    const Dataset test_data = data.subset(partition[f]);
    std::vector<FitResult> fits;
    try {
      fits = fit_path(train_data, spec, unit, path, config);
    } catch (const SolverError& e) {
      throw SolverError("fold " + std::to_string(f) + ": " + e.what(), e.phi());
    }
    for (std::size_t l = 0; l < levels; ++l) {
      fold_loss[f][l] = check_loss_total(test_data, fits[l].beta, spec.tau());
    }
  });

  CvResult result;
  result.lambdas = path.values();
  result.seed = seed;
  result.folds = folds;
  result.mean_loss.assign(levels, 0.0);
  result.standard_error.assign(levels, 0.0);
  for (std::size_t l = 0; l < levels; ++l) {
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) sum += fold_loss[f][l];
    const double mean = sum / static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t f = 0; f < k; ++f) ss += (fold_loss[f][l] - mean) * (fold_loss[f][l] - mean);
    result.mean_loss[l] = mean;
    result.standard_error[l] = std::sqrt(ss / static_cast<double>(k - 1)) /
                               std::sqrt(static_cast<double>(k));
  }

  std::size_t best = 0;
  for (std::size_t l = 1; l < levels; ++l) {
    if (result.mean_loss[l] < result.mean_loss[best]) best = l;
  }
  result.selected_index = best;
  result.selected_lambda = path[best];

  const std::vector<double> prefix(path.values().begin(),
                                   path.values().begin() + static_cast<std::ptrdiff_t>(best) + 1);
  auto refits = fit_path(data, spec, unit, LambdaPath(prefix), config);
  result.refit = std::move(refits.back());
  return result;
}

}  // namespace smoothqr
