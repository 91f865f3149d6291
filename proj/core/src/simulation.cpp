#include "smoothqr/simulation.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "parallel.hpp"
#include "smoothqr/errors.hpp"
#include "smoothqr/rng.hpp"
#include "smoothqr/tuning.hpp"

namespace smoothqr {

std::string_view to_string(CoefficientPattern pattern) {
  switch (pattern) {
    case CoefficientPattern::sparse: return "sparse";
    case CoefficientPattern::dense: return "dense";
    case CoefficientPattern::grouped: return "grouped";
  }
  return "unknown";
}

std::string_view to_string(Noise noise) {
  return noise == Noise::normal ? "normal" : "t";
}

CoefficientPattern parse_pattern(std::string_view name) {
  if (name == "sparse") return CoefficientPattern::sparse;
  if (name == "dense") return CoefficientPattern::dense;
  if (name == "grouped") return CoefficientPattern::grouped;
  throw ConfigError("unknown design '" + std::string(name) + "' (expected sparse, dense or grouped)");
}

Noise parse_noise(std::string_view name) {
  if (name == "normal") return Noise::normal;
  if (name == "t") return Noise::student_t;
  throw ConfigError("unknown noise '" + std::string(name) + "' (expected normal or t)");
}

SimDesign SimDesign::standard(CoefficientPattern pattern, Noise noise, Eigen::Index n,
                              Eigen::Index p, double tau, std::uint64_t seed) {
  SimDesign d;
  d.n = n;
  d.p = p;
  d.pattern = pattern;
  d.correlation = pattern == CoefficientPattern::grouped ? Correlation::block_exchangeable
                                                         : Correlation::ar1;
  d.noise = noise;
  d.tau = tau;
  d.seed = seed;
  return d;
}

std::vector<Eigen::Index> grouped_block_sizes(Eigen::Index p) {
  if (p <= 40 || p % 10 != 0) {
    throw DimensionError("grouped design needs p > 40 with p a multiple of 10, got p = " +
                         std::to_string(p));
  }
  std::vector<Eigen::Index> sizes{5, 5, 10, 10, 10};
  for (int g = 0; g < 10; ++g) sizes.push_back((p - 40) / 10);
  return sizes;
}

Vector true_coefficients(CoefficientPattern pattern, Eigen::Index p) {
  Vector beta = Vector::Zero(p + 1);
  beta(0) = 4.0;
  switch (pattern) {
    case CoefficientPattern::sparse: {
      if (p < 19) throw DimensionError("sparse design needs p >= 19");
      // 1-based positions 2, 4, ..., 20 of the full vector.
      const double values[] = {1.8, 1.6, 1.4, 1.2, 1.0, -1.0, -1.2, -1.4, -1.6, -1.8};
      for (int k = 0; k < 10; ++k) beta(1 + 2 * k) = values[k];
      break;
    }
    case CoefficientPattern::dense:
      if (p < 99) throw DimensionError("dense design needs p >= 99");
      beta.segment(1, 99).setConstant(0.8);
      break;
    case CoefficientPattern::grouped: {
      const auto sizes = grouped_block_sizes(p);
      const double levels[] = {2.0, 1.6, -2.0, 1.0, 0.6};
      Eigen::Index start = 1;
      for (std::size_t g = 0; g < 5; ++g) {
        beta.segment(start, sizes[g]).setConstant(levels[g]);
        start += sizes[g];
      }
      break;
    }
  }
  return beta;
}

Eigen::MatrixXd design_covariance(const SimDesign& design) {
  const Eigen::Index p = design.p;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
  if (design.correlation == Correlation::ar1) {
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index k = 0; k < p; ++k) {
        sigma(j, k) = std::pow(0.7, static_cast<double>(std::abs(j - k)));
      }
    }
    return sigma;
  }
  Eigen::Index start = 0;
  for (Eigen::Index size : grouped_block_sizes(p)) {
    sigma.block(start, start, size, size).setConstant(0.6);
    start += size;
  }
  sigma.diagonal().setOnes();
  return sigma;
}

double t_quantile(double tau, double df) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("t quantile needs tau in (0, 1), got " + std::to_string(tau));
  }
  if (!(df > 0.0)) throw DomainError("degrees of freedom must be positive");
  if (tau == 0.5) return 0.0;
  if (tau < 0.5) return -t_quantile(1.0 - tau, df);
  // Upper tail: P(T > t) = I_{df/(df+t^2)}(df/2, 1/2) / 2.
  auto upper_tail = [df](double t) {
    return 0.5 * boost::math::ibeta(0.5 * df, 0.5, df / (df + t * t));
  };
  const double target = 1.0 - tau;
  double lo = 0.0;
  double hi = 1.0;
  while (upper_tail(hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (upper_tail(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double noise_quantile(Noise noise, double tau) {
  if (noise == Noise::student_t) return t_quantile(tau, kStudentDf);
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("noise quantile needs tau in (0, 1)");
  return std::sqrt(kNormalVariance) * boost::math::quantile(boost::math::normal(), tau);
}

SimulatedData generate(const SimDesign& design) {
  if (design.n < 1 || design.p < 1) throw DimensionError("design needs n >= 1 and p >= 1");
  const Eigen::Index n = design.n;
  const Eigen::Index p = design.p;
  Vector beta_star = true_coefficients(design.pattern, p);
  const Eigen::MatrixXd sigma = design_covariance(design);
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();
  const double shift = noise_quantile(design.noise, design.tau);

  CounterRng rng(design.seed);
  RowMajorMatrix x(n, p + 1);
  x.col(0).setOnes();
  Vector y(n);
  Vector z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    x.row(i).tail(p) = (chol.triangularView<Eigen::Lower>() * z).transpose();
    const double eps = design.noise == Noise::normal ? std::sqrt(kNormalVariance) * rng.normal()
                                                     : rng.student_t(kStudentDf);
    y(i) = x.row(i).dot(beta_star) + (0.5 * x(i, p) + 1.0) * (eps - shift);
  }

  std::optional<GroupStructure> groups;
  if (design.pattern == CoefficientPattern::grouped) {
    groups = GroupStructure::from_sizes(grouped_block_sizes(p));
  }
  return SimulatedData{Dataset::dense(std::move(y), std::move(x)), std::move(beta_star),
                       std::move(groups)};
}

Metrics compute_metrics(const Eigen::Ref<const Vector>& beta_hat,
                        const Eigen::Ref<const Vector>& beta_star,
                        const std::optional<GroupStructure>& groups) {
  if (beta_hat.size() != beta_star.size()) {
    throw DimensionError("estimated and true coefficients differ in length");
  }
  Metrics m;
  m.l2_error = (beta_hat - beta_star).norm();

  int true_nonzero = 0, true_zero = 0, hits = 0, false_hits = 0;
  for (Eigen::Index j = 1; j < beta_star.size(); ++j) {
    const bool est = beta_hat(j) != 0.0;
    if (beta_star(j) != 0.0) {
      ++true_nonzero;
      hits += est;
    } else {
      ++true_zero;
      false_hits += est;
    }
  }
  if (true_nonzero > 0) m.tpr = static_cast<double>(hits) / true_nonzero;
  if (true_zero > 0) m.fpr = static_cast<double>(false_hits) / true_zero;

  if (groups) {
    groups->require_dim(beta_star.size());
    int g_nonzero = 0, g_zero = 0, g_hits = 0, g_false = 0;
    for (const Group& g : groups->groups()) {
      const bool truth = (beta_star.segment(g.start, g.size).array() != 0.0).any();
      const bool est = (beta_hat.segment(g.start, g.size).array() != 0.0).any();
      if (truth) {
        ++g_nonzero;
        g_hits += est;
      } else {
        ++g_zero;
        g_false += est;
      }
    }
    if (g_nonzero > 0) m.group_tpr = static_cast<double>(g_hits) / g_nonzero;
    if (g_zero > 0) m.group_fpr = static_cast<double>(g_false) / g_zero;
  }
  return m;
}

ReplicationOutcome run_method(const SimulatedData& sim, const SimDesign& design,
                              const MethodSpec& method, std::uint64_t cv_seed) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset& data = sim.data;
  const double h = method.bandwidth ? *method.bandwidth
                                    : default_bandwidth(design.n, design.p, design.tau);
  const SmoothingSpec spec(design.tau, h, method.kernel);
  const PenaltySpec unit =
      unit_penalty(method.penalty, data.dim(), method.alpha, sim.groups, method.sparse_group_prox);
  const double lmax = lambda_max(data, spec, unit);
  const LambdaPath path = LambdaPath::geometric(lmax, method.lambda_min_ratio, method.nlambda);
  const CvResult cv = cross_validate(data, spec, unit, path, method.folds, cv_seed, method.solver);
  const auto stop = std::chrono::steady_clock::now();

  ReplicationOutcome out;
  out.metrics = compute_metrics(cv.refit.beta, sim.beta_star, sim.groups);
  out.selected_lambda = cv.selected_lambda;
  out.bandwidth = h;
  out.seconds = std::chrono::duration<double>(stop - start).count();
  return out;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    std::vector<double> sq;
    sq.reserve(values.size());
    for (double v : values) sq.push_back((v - s.mean) * (v - s.mean));
    const double sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size() - 1));
    s.standard_error = sd / std::sqrt(static_cast<double>(values.size()));
  }
  return s;
}

ReplicationReport run_replications(const SimDesign& design, const MethodSpec& method, int reps,
                                   std::uint64_t seed, int threads) {
  if (reps < 1) throw ConfigError("need at least one replication");
  const CounterRng master(seed);
  ReplicationReport report;
  report.outcomes.resize(static_cast<std::size_t>(reps));

  detail::parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    SimDesign rep_design = design;
    rep_design.seed = master.substream(2 * r).key();
    try {
      const SimulatedData sim = generate(rep_design);
      report.outcomes[r] = run_method(sim, rep_design, method, master.substream(2 * r + 1).key());
    } catch (const Error& e) {
      throw Error("replication " + std::to_string(r) + ": " + e.what());
    }
  });

  auto collect = [&](auto getter) -> std::optional<Summary> {
    std::vector<double> values;
    for (const auto& o : report.outcomes) {
      if (const std::optional<double> v = getter(o.metrics)) values.push_back(*v);
    }
    if (values.empty()) return std::nullopt;
    return summarize(values);
  };
  std::vector<double> errors, seconds;
  for (const auto& o : report.outcomes) {
    errors.push_back(o.metrics.l2_error);
    seconds.push_back(o.seconds);
  }
  report.l2_error = summarize(errors);
  report.seconds = summarize(seconds);
  report.tpr = collect([](const Metrics& m) { return m.tpr; });
  report.fpr = collect([](const Metrics& m) { return m.fpr; });
  report.group_tpr = collect([](const Metrics& m) { return m.group_tpr; });
  report.group_fpr = collect([](const Metrics& m) { return m.group_fpr; });
  return report;
}

}  // namespace smoothqr
