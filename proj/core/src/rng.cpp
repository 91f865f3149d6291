#include "smoothqr/rng.hpp"

#include <cmath>
#include <numbers>

namespace smoothqr {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0x632BE59BD9B4E019ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::next() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

CounterRng CounterRng::substream(std::uint64_t id) const noexcept {
  return CounterRng(mix64(key_ ^ mix64(id + kStreamSalt)));
}

double CounterRng::uniform() noexcept { return static_cast<double>(next() >> 11) * kTwoPow53Inv; }

double CounterRng::uniform_open() noexcept {
  return (static_cast<double>(next() >> 11) + 0.5) * kTwoPow53Inv;
}

std::uint64_t CounterRng::uniform_index(std::uint64_t bound) noexcept {
  // High 64 bits of the 128-bit product next() * bound.
  const std::uint64_t a = next();
  const std::uint64_t a_lo = a & 0xFFFFFFFFULL, a_hi = a >> 32;
  const std::uint64_t b_lo = bound & 0xFFFFFFFFULL, b_hi = bound >> 32;
  const std::uint64_t lo_lo = a_lo * b_lo;
  const std::uint64_t hi_lo = a_hi * b_lo;
  const std::uint64_t lo_hi = a_lo * b_hi;
  const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xFFFFFFFFULL) + lo_hi;
  return a_hi * b_hi + (hi_lo >> 32) + (cross >> 32);
}

double CounterRng::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

double CounterRng::gamma(double shape, double scale) noexcept {
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double CounterRng::student_t(double df) noexcept {
  const double z = normal();
  const double chi2_over_df = gamma(0.5 * df, 2.0 / df);
  return z / std::sqrt(chi2_over_df);
}

}  // namespace smoothqr
