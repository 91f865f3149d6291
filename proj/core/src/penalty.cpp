#include "smoothqr/penalty.hpp"

#include <cmath>
#include <string>

#include "smoothqr/errors.hpp"

namespace smoothqr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("regularization level must be finite and >= 0, got " +
                      std::to_string(lambda));
  }
}

// Factor (1 - threshold / norm)_+, zero when the block norm vanishes.
double group_factor(double threshold, double norm) {
  if (norm <= threshold || norm == 0.0) return 0.0;
  return 1.0 - threshold / norm;
}

}  // namespace

GroupStructure GroupStructure::from_sizes(const std::vector<Eigen::Index>& sizes) {
  std::vector<double> weights;
  weights.reserve(sizes.size());
  for (Eigen::Index s : sizes) weights.push_back(std::sqrt(static_cast<double>(s)));
  return from_sizes(sizes, weights);
}

GroupStructure GroupStructure::from_sizes(const std::vector<Eigen::Index>& sizes,
                                          const std::vector<double>& weights) {
  if (sizes.size() != weights.size()) {
    throw DimensionError("group sizes and weights differ in length");
  }
  if (sizes.empty()) throw DimensionError("group structure needs at least one group");
  GroupStructure gs;
  Eigen::Index start = 1;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    if (sizes[g] <= 0) throw DimensionError("group sizes must be positive");
    if (!(weights[g] > 0.0) || !std::isfinite(weights[g])) {
      throw DomainError("group weights must be positive and finite");
    }
    gs.groups_.push_back(Group{start, sizes[g], weights[g]});
    start += sizes[g];
  }
  gs.dim_ = start;
  return gs;
}

void GroupStructure::require_dim(Eigen::Index d) const {
  if (d != dim_) {
    throw DimensionError("group structure covers " + std::to_string(dim_) +
                         " coefficients (intercept included), got " + std::to_string(d));
  }
}

WeightedLasso WeightedLasso::uniform(Eigen::Index dim, double lambda) {
  Vector lambdas = Vector::Constant(dim, lambda);
  lambdas(0) = 0.0;
  return WeightedLasso{std::move(lambdas)};
}

PenaltySpec::PenaltySpec(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const WeightedLasso& p) {
                   if (p.lambdas.size() < 1) throw DimensionError("empty lambda vector");
                   if (p.lambdas(0) != 0.0) {
                     throw DomainError("the intercept must not be penalized (lambda_1 = 0)");
                   }
                   for (Eigen::Index j = 0; j < p.lambdas.size(); ++j) {
                     if (std::isinf(p.lambdas(j)) && p.lambdas(j) > 0) continue;
                     require_lambda(p.lambdas(j));
                   }
                 },
                 [](const ElasticNet& p) {
                   require_lambda(p.lambda);
                   if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) {
                     throw DomainError("elastic-net alpha must lie in [0, 1]");
                   }
                 },
                 [](const GroupLasso& p) { require_lambda(p.lambda); },
                 [](const SparseGroupLasso& p) { require_lambda(p.lambda); },
             },
             v_);
}

PenaltySpec PenaltySpec::scaled(double scale) const {
  require_lambda(scale);
  return std::visit(overloaded{
                        [&](const WeightedLasso& p) -> PenaltySpec {
                          return WeightedLasso{p.lambdas * scale};
                        },
                        [&](const ElasticNet& p) -> PenaltySpec {
                          return ElasticNet{p.lambda * scale, p.alpha};
                        },
                        [&](const GroupLasso& p) -> PenaltySpec {
                          return GroupLasso{p.lambda * scale, p.groups};
                        },
                        [&](const SparseGroupLasso& p) -> PenaltySpec {
                          return SparseGroupLasso{p.lambda * scale, p.groups, p.prox};
                        },
                    },
                    v_);
}

void PenaltySpec::require_dim(Eigen::Index d) const {
  std::visit(overloaded{
                 [&](const WeightedLasso& p) {
                   if (p.lambdas.size() != d) {
                     throw DimensionError("lasso weights have length " +
                                          std::to_string(p.lambdas.size()) + ", expected " +
                                          std::to_string(d));
                   }
                 },
                 [](const ElasticNet&) {},
                 [&](const GroupLasso& p) { p.groups.require_dim(d); },
                 [&](const SparseGroupLasso& p) { p.groups.require_dim(d); },
             },
             v_);
}

bool PenaltySpec::is_group() const noexcept {
  return std::holds_alternative<GroupLasso>(v_) || std::holds_alternative<SparseGroupLasso>(v_);
}

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::lasso: return "lasso";
    case PenaltyKind::elastic_net: return "elastic-net";
    case PenaltyKind::group_lasso: return "group-lasso";
    case PenaltyKind::sparse_group_lasso: return "sparse-group-lasso";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  for (PenaltyKind k : {PenaltyKind::lasso, PenaltyKind::elastic_net, PenaltyKind::group_lasso,
                        PenaltyKind::sparse_group_lasso}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown penalty '" + std::string(name) +
                    "' (expected lasso, elastic-net, group-lasso or sparse-group-lasso)");
}

PenaltySpec unit_penalty(PenaltyKind kind, Eigen::Index dim, double alpha,
                         const std::optional<GroupStructure>& groups, SparseGroupProx prox) {
  switch (kind) {
    case PenaltyKind::lasso:
      return WeightedLasso::uniform(dim, 1.0);
    case PenaltyKind::elastic_net:
      return ElasticNet{1.0, alpha};
    case PenaltyKind::group_lasso:
    case PenaltyKind::sparse_group_lasso:
      if (!groups) throw ConfigError("group penalties require a group specification");
      groups->require_dim(dim);
      if (kind == PenaltyKind::group_lasso) return GroupLasso{1.0, *groups};
      return SparseGroupLasso{1.0, *groups, prox};
  }
  throw ConfigError("unknown penalty kind");
}

double soft_threshold(double a, double b) {
  if (a > b) return a - b;
  if (a < -b) return a + b;
  return 0.0;
}

double penalty_value(const Eigen::Ref<const Vector>& beta, const PenaltySpec& spec) {
  spec.require_dim(beta.size());
  const auto tail = beta.tail(beta.size() - 1);
  return std::visit(
      overloaded{
          [&](const WeightedLasso& p) {
            double total = 0.0;
            for (Eigen::Index j = 1; j < beta.size(); ++j) {
              if (beta(j) != 0.0) total += p.lambdas(j) * std::abs(beta(j));
            }
            return total;
          },
          [&](const ElasticNet& p) {
            return p.lambda * p.alpha * tail.lpNorm<1>() +
                   p.lambda * (1.0 - p.alpha) * tail.squaredNorm();
          },
          [&](const GroupLasso& p) {
            double total = 0.0;
            for (const Group& g : p.groups.groups()) {
              total += g.weight * beta.segment(g.start, g.size).norm();
            }
            return p.lambda * total;
          },
          [&](const SparseGroupLasso& p) {
            double total = tail.lpNorm<1>();
            for (const Group& g : p.groups.groups()) {
              total += g.weight * beta.segment(g.start, g.size).norm();
            }
            return p.lambda * total;
          },
      },
      spec.variant());
}

void prox_step_into(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& grad,
                    double phi, const PenaltySpec& spec, Vector& out) {
  if (!(phi > 0.0)) throw DomainError("quadratic coefficient phi must be positive");
  if (v.size() != grad.size()) throw DimensionError("iterate and gradient differ in length");
  spec.require_dim(v.size());

  out = v - grad / phi;  // u; the intercept keeps its pure gradient step
  const Eigen::Index d = out.size();
  std::visit(overloaded{
                 [&](const WeightedLasso& p) {
                   for (Eigen::Index j = 1; j < d; ++j) {
                     out(j) = soft_threshold(out(j), p.lambdas(j) / phi);
                   }
                 },
                 [&](const ElasticNet& p) {
                   const double threshold = p.lambda * p.alpha / phi;
                   const double shrink = 1.0 + 2.0 * p.lambda * (1.0 - p.alpha) / phi;
                   for (Eigen::Index j = 1; j < d; ++j) {
                     out(j) = soft_threshold(out(j), threshold) / shrink;
                   }
                 },
                 [&](const GroupLasso& p) {
                   for (const Group& g : p.groups.groups()) {
                     auto block = out.segment(g.start, g.size);
                     block *= group_factor(p.lambda * g.weight / phi, block.norm());
                   }
                 },
                 [&](const SparseGroupLasso& p) {
                   const double threshold = p.lambda / phi;
                   for (const Group& g : p.groups.groups()) {
                     auto block = out.segment(g.start, g.size);
                     const double raw_norm = block.norm();
                     for (Eigen::Index j = 0; j < g.size; ++j) {
                       block(j) = soft_threshold(block(j), threshold);
                     }
                     const double norm =
                         p.prox == SparseGroupProx::exact ? block.norm() : raw_norm;
                     block *= group_factor(p.lambda * g.weight / phi, norm);
                   }
                 },
             },
             spec.variant());
}

Vector prox_step(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& grad,
                 double phi, const PenaltySpec& spec) {
  Vector out;
  prox_step_into(v, grad, phi, spec, out);
  return out;
}

}  // namespace smoothqr
