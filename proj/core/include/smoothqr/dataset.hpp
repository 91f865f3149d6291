#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace smoothqr {

using Vector = Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Linear operator standing in for the n x d design matrix. Implementations
/// must satisfy <X b, v> = <b, X^T v>.
class DesignView {
 public:
  virtual ~DesignView() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  /// out = X * beta; `out` is resized as needed.
  virtual void multiply(const Eigen::Ref<const Vector>& beta, Vector& out) const = 0;
  /// out = X^T * v; `out` is resized as needed.
  virtual void transpose_multiply(const Eigen::Ref<const Vector>& v, Vector& out) const = 0;
};

/// Dense row-major design.
class DenseDesign final : public DesignView {
 public:
  /// Throws DimensionError on an empty matrix and DomainError on non-finite entries.
  explicit DenseDesign(RowMajorMatrix x);

  Eigen::Index rows() const override { return x_.rows(); }
  Eigen::Index cols() const override { return x_.cols(); }
  void multiply(const Eigen::Ref<const Vector>& beta, Vector& out) const override;
  void transpose_multiply(const Eigen::Ref<const Vector>& v, Vector& out) const override;

  const RowMajorMatrix& matrix() const noexcept { return x_; }

 private:
  RowMajorMatrix x_;
};

/// Response plus design whose first column is identically one (intercept).
/// Cheap to copy: the design is shared and immutable.
class Dataset {
 public:
  /// Validates sizes, finiteness and the intercept column.
  Dataset(Vector y, std::shared_ptr<const DesignView> design);

  /// Design given with the intercept column already in place.
  static Dataset dense(Vector y, RowMajorMatrix x);
  /// Raw covariates; a column of ones is prepended.
  static Dataset with_intercept(Vector y, const Eigen::Ref<const RowMajorMatrix>& covariates);

  Eigen::Index n() const noexcept { return y_.size(); }
  /// Number of coefficients including the intercept.
  Eigen::Index dim() const noexcept { return design_->cols(); }

  const Vector& y() const noexcept { return y_; }
  const DesignView& design() const noexcept { return *design_; }
  const std::shared_ptr<const DesignView>& design_ptr() const noexcept { return design_; }

  /// Dense designs only: the rows listed in `rows`, in that order.
  Dataset subset(std::span<const Eigen::Index> rows) const;

 private:
  Vector y_;
  std::shared_ptr<const DesignView> design_;
};

}  // namespace smoothqr
