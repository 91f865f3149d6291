#include "smoothqr/lamm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smoothqr/errors.hpp"
#include "smoothqr/objective.hpp"

namespace smoothqr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

}  // namespace

void SolverConfig::validate() const {
  if (!(phi0 > 0.0)) throw DomainError("phi0 must be positive");
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (max_iter < 1 || max_inflate < 1) throw DomainError("iteration caps must be positive");
}

double surrogate_value(const Eigen::Ref<const Vector>& beta, const Eigen::Ref<const Vector>& anchor,
                       double phi, double q_anchor, const Eigen::Ref<const Vector>& grad_anchor) {
  if (!(phi > 0.0)) throw DomainError("quadratic coefficient phi must be positive");
  if (beta.size() != anchor.size() || beta.size() != grad_anchor.size()) {
    throw DimensionError("surrogate arguments differ in length");
  }
  const Vector diff = beta - anchor;
  return q_anchor + grad_anchor.dot(diff) + 0.5 * phi * diff.squaredNorm();
}

FitResult lamm_fit(const Dataset& data, const SmoothingSpec& spec, const PenaltySpec& penalty,
                   const SolverConfig& config, const std::optional<Vector>& init) {
  config.validate();
  const Eigen::Index d = data.dim();
  penalty.require_dim(d);

  FitResult result;
  Vector beta = init ? *init : Vector::Zero(d);
  if (beta.size() != d) {
    throw DimensionError("initial value has length " + std::to_string(beta.size()) +
                         ", expected " + std::to_string(d));
  }

  Vector fitted;
  data.design().multiply(beta, fitted);
  Vector residual = data.y() - fitted;
  Vector weights;
  Vector cand_weights;
  double loss = mean_smoothed_loss(residual, spec, weights);
  Vector grad = gradient_from_weights(data, weights);
  double objective = loss + penalty_value(beta, penalty);
  if (!std::isfinite(objective)) {
    throw SolverError("objective is not finite at the initial value", config.phi0);
  }
  result.objective_trace.push_back(objective);

  double phi = config.phi0;
  Vector candidate;
  Vector cand_residual;
  for (int k = 1; k <= config.max_iter; ++k) {
    phi = std::max(config.phi0, phi / config.gamma);

    double cand_loss = 0.0;
    double surrogate = 0.0;
    int inflations = 0;
    for (;;) {
      prox_step_into(beta, grad, phi, penalty, candidate);
      data.design().multiply(candidate, fitted);
      cand_residual = data.y() - fitted;
      cand_loss = mean_smoothed_loss(cand_residual, spec, cand_weights);
      surrogate = surrogate_value(candidate, beta, phi, loss, grad);
      if (!std::isfinite(cand_loss) || !std::isfinite(surrogate)) {
        throw SolverError("objective became non-finite at iteration " + std::to_string(k), phi);
      }
      if (surrogate >= cand_loss) break;
      phi *= config.gamma;
      if (++inflations > config.max_inflate) {
        std::ostringstream msg;
        msg << "majorization not reached after " << config.max_inflate
            << " inflations at iteration " << k << " (phi = " << phi << ")";
        throw SolverError(msg.str(), phi);
      }
    }

    const double cand_objective = cand_loss + penalty_value(candidate, penalty);
    if (cand_objective > objective) {
      // Only rounding can break descent under an exact proximal step.
      result.converged = cand_objective - objective <= 1e-12 * std::max(1.0, std::abs(objective));
      break;
    }

    const double step = (candidate - beta).norm();
    beta.swap(candidate);
    residual.swap(cand_residual);
    weights.swap(cand_weights);
    loss = cand_loss;
    objective = cand_objective;
    grad = gradient_from_weights(data, weights);
    result.iterations = k;
    result.objective_trace.push_back(objective);
    result.majorization_margin.push_back(surrogate - cand_loss);

    if (step <= config.epsilon) {
      result.converged = true;
      break;
    }
  }

  result.beta = std::move(beta);
  result.final_phi = phi;
  return result;
}

double kkt_residual(const Dataset& data, const Eigen::Ref<const Vector>& beta,
                    const SmoothingSpec& spec, const PenaltySpec& penalty) {
  penalty.require_dim(beta.size());
  const Vector g = gradient(data, beta, spec);
  const Eigen::Index d = beta.size();
  double worst = std::abs(g(0));

  // Distance from -g_j to c * sign(beta_j) (active) or [-c, c] (inactive).
  auto scalar_residual = [](double gj, double bj, double c) {
    if (bj != 0.0) return std::abs(gj + c * sign(bj));
    return std::max(std::abs(gj) - c, 0.0);
  };

  std::visit(
      overloaded{
          [&](const WeightedLasso& p) {
            for (Eigen::Index j = 1; j < d; ++j) {
              worst = std::max(worst, scalar_residual(g(j), beta(j), p.lambdas(j)));
            }
          },
          [&](const ElasticNet& p) {
            const double l1 = p.lambda * p.alpha;
            const double ridge = 2.0 * p.lambda * (1.0 - p.alpha);
            for (Eigen::Index j = 1; j < d; ++j) {
              worst = std::max(worst, scalar_residual(g(j) + ridge * beta(j), beta(j), l1));
            }
          },
          [&](const GroupLasso& p) {
            for (const Group& grp : p.groups.groups()) {
              const auto gg = g.segment(grp.start, grp.size);
              const auto bg = beta.segment(grp.start, grp.size);
              const double radius = p.lambda * grp.weight;
              const double norm = bg.norm();
              const double r = norm > 0.0 ? (gg + radius * bg / norm).norm()
                                          : std::max(gg.norm() - radius, 0.0);
              worst = std::max(worst, r);
            }
          },
          [&](const SparseGroupLasso& p) {
            for (const Group& grp : p.groups.groups()) {
              const auto gg = g.segment(grp.start, grp.size);
              const auto bg = beta.segment(grp.start, grp.size);
              const double radius = p.lambda * grp.weight;
              const double norm = bg.norm();
              double r = 0.0;
              if (norm > 0.0) {
                Vector res(grp.size);
                for (Eigen::Index j = 0; j < grp.size; ++j) {
                  res(j) = scalar_residual(gg(j) + radius * bg(j) / norm, bg(j), p.lambda);
                }
                r = res.norm();
              } else {
                Vector shrunk(grp.size);
                for (Eigen::Index j = 0; j < grp.size; ++j) {
                  shrunk(j) = soft_threshold(gg(j), p.lambda);
                }
                r = std::max(shrunk.norm() - radius, 0.0);
              }
              worst = std::max(worst, r);
            }
          },
      },
      penalty.variant());
  return worst;
}

}  // namespace smoothqr
