#include <chrono>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothqr/errors.hpp"
#include "smoothqr/flam.hpp"
#include "smoothqr/lamm.hpp"

using namespace smoothqr;
using doctest::Approx;

namespace {

double direct_fused(const Vector& theta, const Vector& x) {
  std::vector<std::pair<double, double>> pts;
  for (Eigen::Index i = 0; i < x.size(); ++i) pts.emplace_back(x(i), theta(i));
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double s = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += std::abs(pts[i].second - pts[i - 1].second);
  return s;
}

struct StepData {
  Vector y;
  RowMajorMatrix x;
  Vector truth;  // oracle fitted values
};

// Additive two-level step functions in three covariates.
StepData step_data(Eigen::Index n, std::uint64_t seed, double noise = 0.3) {
  CounterRng rng(seed);
  StepData d{Vector(n), RowMajorMatrix(n, 3), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) d.x(i, j) = rng.uniform();
    const double f = (d.x(i, 0) < 0.5 ? -1.0 : 1.0) + (d.x(i, 1) < 0.3 ? 0.8 : -0.4) +
                     (d.x(i, 2) < 0.7 ? 0.0 : 0.0);
    d.truth(i) = 2.0 + f;
    d.y(i) = d.truth(i) + noise * rng.normal();
  }
  return d;
}

}  // namespace

TEST_CASE("difference design on sorted input is the cumulative sum") {
  const Vector x{{0.1, 0.2, 0.5, 0.9}};
  const auto fd = difference_design(x);
  CHECK(fd.order == std::vector<Eigen::Index>{0, 1, 2, 3});
  Vector out;
  fd.design->multiply(Vector{{1.0, 2.0, -1.0, 0.5}}, out);
  CHECK(out == Vector{{1.0, 3.0, 2.0, 2.5}});
  fd.design->multiply(Vector{{4.0, 0.0, 0.0, 0.0}}, out);
  CHECK(out == Vector::Constant(4, 4.0));
  CHECK(fused_penalty(out, fd.order) == 0.0);
}

TEST_CASE("difference coordinates carry the fused penalty") {
  CounterRng rng(3);
  Vector x(50), z(50);
  for (auto& e : x) e = std::round(10 * rng.uniform());  // ties
  for (auto& e : z) e = rng.normal();
  const auto fd = difference_design(x);
  Vector theta;
  fd.design->multiply(z, theta);
  CHECK(direct_fused(theta, x) == Approx(z.tail(49).cwiseAbs().sum()).epsilon(1e-12));
  CHECK(fused_penalty(theta, fd.order) == Approx(z.tail(49).cwiseAbs().sum()).epsilon(1e-12));
  CHECK((to_differences(theta, fd.order) - z).norm() <= 1e-12);
  CHECK((from_differences(z, fd.order) - theta).norm() <= 1e-12);
  // Stable sort: equal values keep their original order.
  for (std::size_t k = 1; k < fd.order.size(); ++k) {
    const auto a = fd.order[k - 1], b = fd.order[k];
    CHECK(x(a) <= x(b));
    if (x(a) == x(b)) CHECK(a < b);
  }
}

TEST_CASE("block solver limits") {
  CounterRng rng(8);
  const Eigen::Index n = 40;
  Vector x(n), r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = rng.uniform();
    r(i) = rng.normal();
  }
  const auto fd = difference_design(x);
  const SmoothingSpec spec(0.5, 0.2);
  SolverConfig cfg;
  cfg.epsilon = 1e-7;
  const Vector big = solve_fused_block(r, fd, 1e6, spec, cfg);
  CHECK(big.maxCoeff() - big.minCoeff() == 0.0);
  // Unpenalized differences are badly conditioned; give the solver room.
  cfg.max_iter = 100000;
  const Vector free = solve_fused_block(r, fd, 0.0, spec, cfg);
  CHECK(mean_smoothed_loss(r - free, spec) <= mean_smoothed_loss(Vector::Zero(n), spec) + 1e-9);
}

TEST_CASE("two-level residuals are recovered for small lambda") {
  const Eigen::Index n = 40;
  Vector x(n), r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = static_cast<double>(i);
    r(i) = i < n / 2 ? 1.5 : -1.5;
  }
  const SmoothingSpec spec(0.5, 0.1);
  const double lambda = 0.01;
  SolverConfig cfg;
  cfg.epsilon = 1e-9;
  const Vector theta = solve_fused_block(r, difference_design(x), lambda, spec, cfg);
  auto objective = [&](const Vector& t) {
    return mean_smoothed_loss(r - t, spec) + lambda * direct_fused(t, x);
  };
  // Brute force over two-level candidates with the jump anywhere.
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index cut = 0; cut <= n; ++cut)
    for (double a = -2.0; a <= 2.0; a += 0.01)
      for (double b : {a, -1.5 + 0.0, 1.5}) {
        Vector t(n);
        for (Eigen::Index i = 0; i < n; ++i) t(i) = i < cut ? a : b;
        best = std::min(best, objective(t));
      }
  CHECK(objective(theta) <= best + 1e-9);
  CHECK(theta.head(n / 2).maxCoeff() - theta.head(n / 2).minCoeff() <= 1e-6);
  CHECK(theta.tail(n / 2).maxCoeff() - theta.tail(n / 2).minCoeff() <= 1e-6);
  CHECK(theta(0) - theta(n - 1) > 2.5);
}

TEST_CASE("fit_flam centering and descent") {
  const auto d = step_data(120, 4);
  const SmoothingSpec spec(0.5, 0.2);
  const FlamFit fit = fit_flam(d.y, d.x, 0.01, spec);
  CHECK(fit.converged);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::abs(fit.theta.col(j).mean()) <= 1e-12);
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
    CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] * (1 + 1e-12));
  CHECK(flam_objective(d.y, fit) == Approx(fit.objective_trace.back()).epsilon(1e-12));
  // Prediction at a training row reproduces the fitted value.
  for (Eigen::Index i : {0, 17, 119}) {
    const double fitted = fit.theta0 + fit.theta.row(i).sum();
    CHECK(predict_flam(fit, d.x.row(i).transpose()) == Approx(fitted).epsilon(1e-12));
  }
}

TEST_CASE("single covariate equals the block solve plus centering") {
  const auto d = step_data(60, 9);
  const SmoothingSpec spec(0.4, 0.3);
  FlamConfig cfg;
  cfg.epsilon = 1e-10;
  cfg.block.epsilon = 1e-10;
  const FlamFit fit = fit_flam(d.y, d.x.leftCols(1), 0.02, spec, cfg);
  SolverConfig block;
  block.epsilon = 1e-11;
  const Vector theta = solve_fused_block(d.y, difference_design(d.x.col(0)), 0.02, spec, block);
  const Vector centered = theta.array() - theta.mean();
  CHECK((fit.theta.col(0) - centered).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK(fit.theta0 == Approx(theta.mean()).epsilon(1e-5));
}

TEST_CASE("huge lambda leaves only the intercept") {
  const auto d = step_data(80, 2);
  const SmoothingSpec spec(0.3, 0.25);
  const FlamFit fit = fit_flam(d.y, d.x, 1e6, spec);
  CHECK(fit.theta.cwiseAbs().maxCoeff() <= 1e-12);
  const auto icpt = lamm_fit(Dataset::dense(d.y, RowMajorMatrix::Ones(80, 1)), spec,
                             WeightedLasso::uniform(1, 0.0), {});
  CHECK(fit.theta0 == Approx(icpt.beta(0)).epsilon(1e-3));
}

TEST_CASE("prediction conventions") {
  RowMajorMatrix x(4, 1);
  x << 0.0, 1.0, 2.0, 3.0;
  const Vector y{{0.0, 0.0, 5.0, 5.0}};
  const FlamFit fit = fit_flam(y, x, 1e-4, SmoothingSpec(0.5, 0.05));
  const double f0 = fit.theta0 + fit.theta(0, 0), f1 = fit.theta0 + fit.theta(1, 0);
  const double f3 = fit.theta0 + fit.theta(3, 0);
  CHECK(predict_flam(fit, Vector{{-10.0}}) == Approx(f0));
  CHECK(predict_flam(fit, Vector{{1.5}}) == Approx(f1));
  CHECK(predict_flam(fit, Vector{{99.0}}) == Approx(f3));
  CHECK_THROWS_AS(predict_flam(fit, Vector{{std::nan("")}}), DomainError);
  CHECK_THROWS_AS(predict_flam(fit, Vector{{1.0, 2.0}}), DimensionError);
}

TEST_CASE("cumulative-sum products scale linearly") {
  auto time_one = [](Eigen::Index n) {
    CounterRng rng(1);
    Vector x(n), z(n), out(n);
    for (auto& e : x) e = rng.uniform();
    for (auto& e : z) e = rng.normal();
    const auto fd = difference_design(x);
    const int reps = static_cast<int>(20000000 / n);
    double best = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 5; ++trial) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int r = 0; r < reps; ++r) {
        fd.design->multiply(z, out);
        fd.design->transpose_multiply(out, z);
        z *= 1e-3;
      }
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best / reps;
  };
  // Sizes small enough to stay in cache, so the ratio reflects operation counts.
  const double ratio = time_one(20000) / time_one(10000);
  CHECK(ratio <= 3.0);
  CHECK(ratio >= 2.0 / 1.5);
}
