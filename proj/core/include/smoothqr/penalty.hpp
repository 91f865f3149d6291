#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "smoothqr/dataset.hpp"

namespace smoothqr {

/// One contiguous block of coefficients.
struct Group {
  Eigen::Index start;  // index into the full coefficient vector (>= 1)
  Eigen::Index size;
  double weight;
};

/// Partition of the non-intercept coordinates 1..d-1 into contiguous groups.
class GroupStructure {
 public:
  /// Groups laid out back to back starting at coordinate 1, with the
  /// default weights sqrt(size).
  static GroupStructure from_sizes(const std::vector<Eigen::Index>& sizes);
  /// Same layout with explicit weights (all > 0).
  static GroupStructure from_sizes(const std::vector<Eigen::Index>& sizes,
                                   const std::vector<double>& weights);

  const std::vector<Group>& groups() const noexcept { return groups_; }
  /// Coefficient dimension covered, intercept included.
  Eigen::Index dim() const noexcept { return dim_; }
  /// Throws DimensionError unless dim() == d.
  void require_dim(Eigen::Index d) const;

 private:
  std::vector<Group> groups_;
  Eigen::Index dim_ = 1;
};

/// sum_j lambda_j |beta_j|; lambdas(0) must be 0.
struct WeightedLasso {
  Vector lambdas;

  static WeightedLasso uniform(Eigen::Index dim, double lambda);
};

/// lambda * alpha * ||beta||_1 + lambda * (1 - alpha) * ||beta||_2^2.
struct ElasticNet {
  double lambda;
  double alpha;
};

/// lambda * sum_g w_g ||beta_g||_2.
struct GroupLasso {
  double lambda;
  GroupStructure groups;
};

/// How the sparse-group-lasso update forms its group shrinkage factor.
enum class SparseGroupProx {
  exact,    // norm of the soft-thresholded block: the true proximal map
  printed,  // norm of the un-thresholded block
};

/// lambda * ||beta||_1 + lambda * sum_g w_g ||beta_g||_2.
struct SparseGroupLasso {
  double lambda;
  GroupStructure groups;
  SparseGroupProx prox = SparseGroupProx::exact;
};

/// One of the four convex penalties. The intercept (coordinate 0) is never
/// penalized.
class PenaltySpec {
 public:
  using Variant = std::variant<WeightedLasso, ElasticNet, GroupLasso, SparseGroupLasso>;

  /// Validates the parameters; throws DomainError or DimensionError.
  PenaltySpec(Variant v);  // NOLINT(google-explicit-constructor)
  PenaltySpec(WeightedLasso p) : PenaltySpec(Variant(std::move(p))) {}      // NOLINT
  PenaltySpec(ElasticNet p) : PenaltySpec(Variant(p)) {}                    // NOLINT
  PenaltySpec(GroupLasso p) : PenaltySpec(Variant(std::move(p))) {}         // NOLINT
  PenaltySpec(SparseGroupLasso p) : PenaltySpec(Variant(std::move(p))) {}   // NOLINT

  const Variant& variant() const noexcept { return v_; }

  /// Penalty with every regularization level multiplied by `scale`. Used to
  /// walk a lambda path from a unit template.
  PenaltySpec scaled(double scale) const;

  /// Throws DimensionError if the penalty cannot apply to a d-vector.
  void require_dim(Eigen::Index d) const;

  bool is_group() const noexcept;

 private:
  Variant v_;
};

enum class PenaltyKind { lasso, elastic_net, group_lasso, sparse_group_lasso };

std::string_view to_string(PenaltyKind kind);
/// Accepts "lasso", "elastic-net", "group-lasso", "sparse-group-lasso".
PenaltyKind parse_penalty_kind(std::string_view name);

/// Penalty of the given kind at lambda = 1 (uniform unit weights for the
/// lasso). Group kinds need `groups`; throws ConfigError otherwise.
PenaltySpec unit_penalty(PenaltyKind kind, Eigen::Index dim, double alpha = 1.0,
                         const std::optional<GroupStructure>& groups = std::nullopt,
                         SparseGroupProx prox = SparseGroupProx::exact);

/// sign(a) * max(|a| - b, 0).
double soft_threshold(double a, double b);

/// P(beta), excluding the intercept.
double penalty_value(const Eigen::Ref<const Vector>& beta, const PenaltySpec& spec);

/// Exact minimizer of phi/2 ||beta - u||^2 + P(beta) with u = v - grad/phi
/// (the printed sparse-group variant is not exact). Throws DomainError when
/// phi <= 0.
Vector prox_step(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& grad,
                 double phi, const PenaltySpec& spec);

/// Same as prox_step, writing into `out` (resized as needed).
void prox_step_into(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& grad,
                    double phi, const PenaltySpec& spec, Vector& out);

}  // namespace smoothqr
