#pragma once

#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "aqmsim/error.hpp"

namespace aqmsim {

/// All simulated time is integer nanoseconds; rates and delays are
/// converted once at config load so the clock never drifts.
using Duration = std::chrono::nanoseconds;

/// Instant on the simulated clock, nanoseconds since run start.
class SimTime {
 public:
  constexpr SimTime() = default;
  explicit constexpr SimTime(Duration since_start) : ns_(since_start.count()) {}

  static constexpr SimTime from_ns(std::int64_t ns) { return SimTime(Duration(ns)); }

  constexpr std::int64_t ns() const { return ns_; }
  constexpr Duration since_start() const { return Duration(ns_); }
  constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }

  friend constexpr auto operator<=>(SimTime a, SimTime b) = default;
  friend constexpr SimTime operator+(SimTime t, Duration d) { return from_ns(t.ns_ + d.count()); }
  friend constexpr SimTime operator-(SimTime t, Duration d) { return from_ns(t.ns_ - d.count()); }
  friend constexpr Duration operator-(SimTime a, SimTime b) { return Duration(a.ns_ - b.ns_); }

 private:
  std::int64_t ns_ = 0;
};

constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) * 1e-9; }

constexpr Duration from_seconds_exact(std::int64_t s) { return std::chrono::seconds(s); }

inline Duration duration_from_seconds(double s) {
  return Duration(static_cast<std::int64_t>(std::llround(s * 1e9)));
}

/// Wire time of `bytes` at `rate_bps`, rounded to the nearest nanosecond.
constexpr Duration transmission_time(std::uint64_t bytes, std::uint64_t rate_bps) {
  const std::uint64_t bits_ns = bytes * 8ull * 1'000'000'000ull;
  return Duration(static_cast<std::int64_t>((bits_ns + rate_bps / 2) / rate_bps));
}

/// Parses "300s", "30ms", "5us", "174400ns" or a bare integer (nanoseconds).
/// Fractional values are rounded to the nearest nanosecond.
inline Duration parse_duration(std::string_view text) {
  if (text.empty()) throw ConfigError("empty duration");
  double scale = 1.0;
  std::string_view digits = text;
  auto ends_with = [&](std::string_view suffix) {
    return text.size() > suffix.size() &&
           text.substr(text.size() - suffix.size()) == suffix;
  };
  if (ends_with("ns")) {
    digits = text.substr(0, text.size() - 2);
  } else if (ends_with("us")) {
    scale = 1e3;
    digits = text.substr(0, text.size() - 2);
  } else if (ends_with("ms")) {
    scale = 1e6;
    digits = text.substr(0, text.size() - 2);
  } else if (ends_with("s")) {
    scale = 1e9;
    digits = text.substr(0, text.size() - 1);
  }
  if (digits == "inf") return Duration::max();
  try {
    std::size_t used = 0;
    const double value = std::stod(std::string(digits), &used);
    if (used != digits.size()) throw ConfigError("bad duration: " + std::string(text));
    return Duration(static_cast<std::int64_t>(std::llround(value * scale)));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad duration: " + std::string(text));
  }
}

/// Canonical text form: largest unit that divides the value exactly.
inline std::string format_duration(Duration d) {
  const std::int64_t ns = d.count();
  if (d == Duration::max()) return "inf";
  if (ns % 1'000'000'000 == 0) return std::to_string(ns / 1'000'000'000) + "s";
  if (ns % 1'000'000 == 0) return std::to_string(ns / 1'000'000) + "ms";
  if (ns % 1'000 == 0) return std::to_string(ns / 1'000) + "us";
  return std::to_string(ns) + "ns";
}

}  // namespace aqmsim
