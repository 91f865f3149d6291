#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace smoothqr {

/// SplitMix64 run in counter mode: the i-th draw of a stream with key k is
/// mix64(k + i * 0x9E3779B97F4A7C15), i = 1, 2, ...  Any implementation of
/// the same mixing function reproduces the streams exactly.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  std::uint64_t next() noexcept;

  /// Independent stream for index `id`, keyed by mix64(key ^ mix64(id + c)).
  CounterRng substream(std::uint64_t id) const noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Top 53 bits scaled to [0, 1).
  double uniform() noexcept;
  /// (0, 1): top 53 bits plus one half, scaled.
  double uniform_open() noexcept;
  /// Uniform integer in [0, bound) by 128-bit multiply-high.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;
  /// Standard normal by Box-Muller; draws come in pairs (cosine branch first).
  double normal() noexcept;
  /// Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 uses the
  /// Gamma(shape + 1) * U^(1/shape) boost.
  double gamma(double shape, double scale) noexcept;
  /// Student t: N(0,1) / sqrt(Gamma(df/2, 2/df)).
  double student_t(double df) noexcept;

  /// Fisher-Yates shuffle, i = n-1 down to 1, j = uniform_index(i + 1).
  template <class T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace smoothqr
