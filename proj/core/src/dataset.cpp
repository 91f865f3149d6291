#include "smoothqr/dataset.hpp"

#include <cmath>
#include <string>

#include "smoothqr/errors.hpp"

namespace smoothqr {

DenseDesign::DenseDesign(RowMajorMatrix x) : x_(std::move(x)) {
  if (x_.rows() == 0 || x_.cols() == 0) {
    throw DimensionError("design matrix must be non-empty");
  }
  if (!x_.allFinite()) {
    throw DomainError("design matrix contains non-finite entries");
  }
}

void DenseDesign::multiply(const Eigen::Ref<const Vector>& beta, Vector& out) const {
  if (beta.size() != x_.cols()) {
    throw DimensionError("coefficient vector has length " + std::to_string(beta.size()) +
                         ", design has " + std::to_string(x_.cols()) + " columns");
  }
  // Sparse coefficient vectors (common along a lasso path) skip zero columns.
  Eigen::Index nonzero = 0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) nonzero += beta(j) != 0.0;
  if (4 * nonzero >= beta.size()) {
    out.noalias() = x_ * beta;
    return;
  }
  out.setZero(x_.rows());
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) out.noalias() += beta(j) * x_.col(j);
  }
}

void DenseDesign::transpose_multiply(const Eigen::Ref<const Vector>& v, Vector& out) const {
  if (v.size() != x_.rows()) {
    throw DimensionError("vector has length " + std::to_string(v.size()) + ", design has " +
                         std::to_string(x_.rows()) + " rows");
  }
  out.noalias() = x_.transpose() * v;
}

Dataset::Dataset(Vector y, std::shared_ptr<const DesignView> design)
    : y_(std::move(y)), design_(std::move(design)) {
  if (!design_) throw DimensionError("dataset needs a design");
  if (y_.size() < 1) throw DimensionError("dataset needs at least one observation");
  if (design_->rows() != y_.size()) {
    throw DimensionError("response has " + std::to_string(y_.size()) + " entries, design has " +
                         std::to_string(design_->rows()) + " rows");
  }
  if (!y_.allFinite()) throw DomainError("response contains non-finite entries");

  Vector e0 = Vector::Zero(design_->cols());
  e0(0) = 1.0;
  Vector first_column;
  design_->multiply(e0, first_column);
  for (Eigen::Index i = 0; i < first_column.size(); ++i) {
    if (first_column(i) != 1.0) {
      throw DomainError("first design column must be identically 1 (row " + std::to_string(i) +
                        ")");
    }
  }
}

Dataset Dataset::dense(Vector y, RowMajorMatrix x) {
  return Dataset(std::move(y), std::make_shared<const DenseDesign>(std::move(x)));
}

Dataset Dataset::with_intercept(Vector y, const Eigen::Ref<const RowMajorMatrix>& covariates) {
  RowMajorMatrix x(covariates.rows(), covariates.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(covariates.cols()) = covariates;
  return dense(std::move(y), std::move(x));
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  const auto* dense_design = dynamic_cast<const DenseDesign*>(design_.get());
  if (dense_design == nullptr) {
    throw ConfigError("row subsets are only available for dense designs");
  }
  const RowMajorMatrix& x = dense_design->matrix();
  RowMajorMatrix xs(static_cast<Eigen::Index>(rows.size()), x.cols());
  Vector ys(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Eigen::Index i = rows[k];
    if (i < 0 || i >= n()) throw DimensionError("row index out of range");
    xs.row(static_cast<Eigen::Index>(k)) = x.row(i);
    ys(static_cast<Eigen::Index>(k)) = y_(i);
  }
  return dense(std::move(ys), std::move(xs));
}

}  // namespace smoothqr
