#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothqr/errors.hpp"
#include "smoothqr/flam.hpp"
#include "smoothqr/objective.hpp"

using namespace smoothqr;
using doctest::Approx;

TEST_CASE("check loss total on a tiny design") {
  RowMajorMatrix x(3, 2);
  x << 1, 0, 1, 1, 1, 2;
  const Dataset data = Dataset::dense(Vector{{1.0, 0.0, 5.0}}, x);
  // residuals 1, -1, 3 at beta = (0, 1)
  CHECK(check_loss_total(data, Vector{{0.0, 1.0}}, 0.25) == Approx((0.25 + 0.75 + 0.75) / 3));
  CHECK(check_loss_total(data, Vector{{1.0, 0.0}}, 0.5) == Approx((0.0 + 0.5 + 2.0) / 3));
  RowMajorMatrix ones = RowMajorMatrix::Ones(2, 1);
  const Dataset pair = Dataset::dense(Vector{{1.0, -1.0}}, ones);
  CHECK(check_loss_total(pair, Vector{{0.0}}, 0.3) == Approx(0.5));
  const Dataset wide = Dataset::dense(Vector{{2.0, -2.0}}, ones);
  CHECK(check_loss_total(wide, Vector{{0.0}}, 0.3) == Approx(1.0));
  CHECK(check_loss_total(wide, Vector{{7.0}}, 0.3) == Approx(7.0 * 0.7));
  CHECK_THROWS_AS(check_loss_total(data, Vector{{1.0, 0.0}}, 1.0), DomainError);
}

TEST_CASE("dataset validation") {
  RowMajorMatrix x(2, 2);
  x << 1, 3, 2, 4;
  CHECK_THROWS(Dataset::dense(Vector{{1.0, 2.0}}, x));
  x(1, 0) = 1;
  CHECK_THROWS_AS(Dataset::dense(Vector{{1.0}}, x), DimensionError);
  CHECK_THROWS_AS(Dataset::dense(Vector{{1.0, std::nan("")}}, x), DomainError);
  const Dataset ok = Dataset::dense(Vector{{1.0, 2.0}}, x);
  CHECK(ok.n() == 2);
  CHECK(ok.dim() == 2);
  const Dataset wi = Dataset::with_intercept(Vector{{1.0, 2.0}}, RowMajorMatrix::Constant(2, 3, 0.5));
  CHECK(wi.dim() == 4);
}

TEST_CASE("gradient matches finite differences of the loss") {
  for (Kernel k : kAllKernels) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Dataset data = testing::random_dataset(40, 8, seed);
      const SmoothingSpec spec(0.3, 0.5, k);
      CounterRng rng(seed + 100);
      Vector beta(8);
      for (auto& b : beta) b = rng.normal();
      const Vector g = gradient(data, beta, spec);
      for (Eigen::Index j = 0; j < 8; ++j) {
        Vector bp = beta, bm = beta;
        const double step = 1e-6;
        bp(j) += step;
        bm(j) -= step;
        const double fd = (loss_value(data, bp, spec) - loss_value(data, bm, spec)) / (2 * step);
        CHECK(std::abs(fd - g(j)) <= 1e-6 * std::max(1.0, std::abs(g(j))));
      }
    }
  }
}

TEST_CASE("gradient has the documented closed form") {
  const Dataset data = testing::random_dataset(25, 4, 3);
  const SmoothingSpec spec(0.6, 0.3, Kernel::logistic);
  const Vector beta = Vector::Constant(4, 0.2);
  const Vector r = residuals(data, beta);
  const auto& x = dynamic_cast<const DenseDesign&>(data.design()).matrix();
  Vector expected = Vector::Zero(4);
  for (Eigen::Index i = 0; i < 25; ++i) {
    const double w = 1.0 / (1.0 + std::exp(r(i) / 0.3)) - 0.6;  // logistic K̄(-r/h) - tau
    expected += x.row(i).transpose() * w;
  }
  expected /= 25.0;
  CHECK((gradient(data, beta, spec) - expected).norm() <= 1e-13);
}

namespace {

void check_adjoint(const DesignView& op, std::uint64_t seed) {
  CounterRng rng(seed);
  Vector b(op.cols()), v(op.rows()), xb, xtv;
  for (auto& e : b) e = rng.normal();
  for (auto& e : v) e = rng.normal();
  op.multiply(b, xb);
  op.transpose_multiply(v, xtv);
  CHECK(xb.dot(v) == Approx(b.dot(xtv)).epsilon(1e-12));
}

}  // namespace

TEST_CASE("design operators are adjoint pairs") {
  const Dataset data = testing::random_dataset(17, 6, 9);
  check_adjoint(data.design(), 1);
  CounterRng rng(4);
  Vector x(30);
  for (auto& e : x) e = std::floor(4 * rng.uniform());  // ties on purpose
  check_adjoint(*difference_design(x).design, 2);
}

TEST_CASE("mean check loss matches the per-observation definition") {
  const Vector r{{-1.0, 2.0, 0.0, -0.5}};
  CHECK(mean_check_loss(r, 0.2) == Approx((0.8 + 0.4 + 0.0 + 0.4) / 4));
}
