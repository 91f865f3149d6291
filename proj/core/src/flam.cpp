#include "smoothqr/flam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "smoothqr/errors.hpp"
#include "smoothqr/objective.hpp"
#include "smoothqr/penalty.hpp"

namespace smoothqr {

CumsumDesign::CumsumDesign(std::vector<Eigen::Index> order) : order_(std::move(order)) {
  if (order_.empty()) throw DimensionError("cumulative-sum design needs at least one row");
}

void CumsumDesign::multiply(const Eigen::Ref<const Vector>& z, Vector& out) const {
  const Eigen::Index n = rows();
  if (z.size() != n) throw DimensionError("difference vector length does not match design");
  out.resize(n);
  double running = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    running += z(k);
    out(order_[static_cast<std::size_t>(k)]) = running;
  }
}

void CumsumDesign::transpose_multiply(const Eigen::Ref<const Vector>& v, Vector& out) const {
  const Eigen::Index n = rows();
  if (v.size() != n) throw DimensionError("vector length does not match design");
  out.resize(n);
  double running = 0.0;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    running += v(order_[static_cast<std::size_t>(k)]);
    out(k) = running;
  }
}

FusedDesign difference_design(const Eigen::Ref<const Vector>& x) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  auto design = std::make_shared<const CumsumDesign>(order);
  return FusedDesign{std::move(order), std::move(design)};
}

Vector to_differences(const Eigen::Ref<const Vector>& theta,
                      const std::vector<Eigen::Index>& order) {
  Vector z(theta.size());
  double previous = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double current = theta(order[k]);
    z(static_cast<Eigen::Index>(k)) = current - previous;
    previous = current;
  }
  return z;
}

Vector from_differences(const Eigen::Ref<const Vector>& z, const std::vector<Eigen::Index>& order) {
  Vector theta;
  CumsumDesign(order).multiply(z, theta);
  return theta;
}

double fused_penalty(const Eigen::Ref<const Vector>& theta,
                     const std::vector<Eigen::Index>& order) {
  double total = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    total += std::abs(theta(order[k]) - theta(order[k - 1]));
  }
  return total;
}

Vector solve_fused_block(const Eigen::Ref<const Vector>& residual, const FusedDesign& design,
                         double lambda, const SmoothingSpec& spec, const SolverConfig& config,
                         const std::optional<Vector>& warm) {
  if (residual.size() != design.design->rows()) {
    throw DimensionError("residual and covariate lengths differ");
  }
  const Dataset block(residual, design.design);
  const PenaltySpec penalty = WeightedLasso::uniform(block.dim(), lambda);
  std::optional<Vector> init;
  if (warm) {
    if (warm->size() != residual.size()) throw DimensionError("warm start length mismatch");
    init = to_differences(*warm, design.order);
  }
  const FitResult fit = lamm_fit(block, spec, penalty, config, init);
  return from_differences(fit.beta, design.order);
}

FlamFit fit_flam(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const RowMajorMatrix>& x,
                 double lambda, const SmoothingSpec& spec, const FlamConfig& config) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = x.cols();
  if (n < 2) throw DimensionError("fused additive model needs n >= 2");
  if (x.rows() != n) throw DimensionError("covariate rows do not match response length");
  if (p < 1) throw DimensionError("fused additive model needs at least one covariate");
  if (!x.allFinite() || !y.allFinite()) throw DomainError("non-finite input");
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");

  std::vector<FusedDesign> designs;
  designs.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) designs.push_back(difference_design(x.col(j)));

  SolverConfig block_config = config.block;
  block_config.epsilon = config.epsilon / static_cast<double>(p);

  FlamFit fit;
  fit.lambda = lambda;
  fit.spec = spec;
  fit.theta = Eigen::MatrixXd::Zero(n, p);
  for (const FusedDesign& fd : designs) fit.order.push_back(fd.order);
  Vector total = Vector::Zero(n);  // sum_j theta_j
  fit.objective_trace.push_back(flam_objective(y, fit));

  for (int cycle = 1; cycle <= config.max_cycles; ++cycle) {
    double change = 0.0;
    const double theta0_before = fit.theta0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Vector previous = fit.theta.col(j);
      const Vector residual =
          y - Vector::Constant(n, fit.theta0) - (total - previous);
      Vector updated;
      try {
        updated = solve_fused_block(residual, designs[static_cast<std::size_t>(j)], lambda, spec,
                                    block_config, previous);
      } catch (const SolverError& e) {
        throw SolverError("covariate " + std::to_string(j) + ", cycle " +
                              std::to_string(cycle) + ": " + e.what(),
                          e.phi());
      }
      const double mean = updated.mean();
      fit.theta0 += mean;
      updated.array() -= mean;
      change += (updated - previous).norm();
      total += updated - previous;
      fit.theta.col(j) = updated;
    }
    change += std::abs(fit.theta0 - theta0_before);
    fit.cycles = cycle;
    fit.objective_trace.push_back(flam_objective(y, fit));
    if (change <= config.epsilon) {
      fit.converged = true;
      break;
    }
  }

  fit.sorted_x.resize(static_cast<std::size_t>(p));
  fit.sorted_theta.resize(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& order = designs[static_cast<std::size_t>(j)].order;
    Vector xs(n);
    Vector ts(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      xs(k) = x(order[static_cast<std::size_t>(k)], j);
      ts(k) = fit.theta(order[static_cast<std::size_t>(k)], j);
    }
    fit.sorted_x[static_cast<std::size_t>(j)] = std::move(xs);
    fit.sorted_theta[static_cast<std::size_t>(j)] = std::move(ts);
  }

  if (!fit.converged) {
    throw SolverError("fused additive fit did not converge in " +
                          std::to_string(config.max_cycles) + " cycles",
                      0.0);
  }
  return fit;
}

double flam_objective(const Eigen::Ref<const Vector>& y, const FlamFit& fit) {
  const Eigen::Index n = y.size();
  if (fit.theta.rows() != n) throw DimensionError("fit and response lengths differ");
  const Vector residual = y - Vector::Constant(n, fit.theta0) - fit.theta.rowwise().sum();
  if (static_cast<Eigen::Index>(fit.order.size()) != fit.theta.cols()) {
    throw DimensionError("fit carries no sort order for some covariate");
  }
  double penalty = 0.0;
  for (Eigen::Index j = 0; j < fit.theta.cols(); ++j) {
    penalty += fused_penalty(fit.theta.col(j), fit.order[static_cast<std::size_t>(j)]);
  }
  return mean_smoothed_loss(residual, fit.spec) + fit.lambda * penalty;
}

double predict_flam(const FlamFit& fit, const Eigen::Ref<const Vector>& x_new) {
  const auto p = static_cast<Eigen::Index>(fit.sorted_x.size());
  if (x_new.size() != p) {
    throw DimensionError("prediction row has " + std::to_string(x_new.size()) +
                         " covariates, model has " + std::to_string(p));
  }
  if (!x_new.allFinite()) throw DomainError("prediction row contains non-finite values");
  double value = fit.theta0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const Vector& xs = fit.sorted_x[static_cast<std::size_t>(j)];
    const Vector& ts = fit.sorted_theta[static_cast<std::size_t>(j)];
    const double* begin = xs.data();
    const double* end = xs.data() + xs.size();
    const double* it = std::upper_bound(begin, end, x_new(j));
    const Eigen::Index k = it == begin ? 0 : static_cast<Eigen::Index>(it - begin) - 1;
    value += ts(k);
  }
  return value;
}

}  // namespace smoothqr
