#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "aqmsim/time.hpp"

namespace aqmsim {

/// The one stochastic source of a simulation instance. Every draw
/// (AQM uniforms, file sizes, think times, flow start offsets) comes from
/// this stream in schedule-determined order, so a seed pins the whole run.
///
/// Distributions are derived by hand from raw 64-bit words instead of the
/// std::*_distribution adaptors, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform instant offset in [lo, hi).
  Duration uniform_duration(Duration lo, Duration hi) {
    const double span = static_cast<double>((hi - lo).count());
    return lo + Duration(static_cast<std::int64_t>(uniform01() * span));
  }

  /// Exponential with the given mean, rounded to whole nanoseconds.
  Duration exponential(Duration mean) {
    const double u = uniform01();
    const double draw = -std::log1p(-u) * static_cast<double>(mean.count());
    return Duration(static_cast<std::int64_t>(std::llround(draw)));
  }

  /// Uniform index in [0, n).
  std::size_t pick_index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace aqmsim
