#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aqmsim/aqm/drop.hpp"
#include "aqmsim/error.hpp"

namespace aqmsim::metrics {

/// Nearest-rank percentile: element at 1-based index ceil(q/100 * n);
/// q = 0 reads the minimum. No interpolation, reproducible everywhere.
template <typename T>
T percentile_sorted(std::span<const T> sorted, double q) {
  if (sorted.empty()) throw EmptySeries("percentile of empty series");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

template <typename T>
T percentile(std::vector<T> samples, double q) {
  std::sort(samples.begin(), samples.end());
  return percentile_sorted(std::span<const T>(samples), q);
}

/// Distinct values with cumulative fractions; last fraction is exactly 1.
template <typename T>
std::vector<std::pair<T, double>> cdf_points(std::span<const T> sorted) {
  if (sorted.empty()) throw EmptySeries("cdf of empty series");
  std::vector<std::pair<T, double>> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  out.back().second = 1.0;
  return out;
}

inline double utilization_sample(double bits_departed_in_second, double link_rate_bps) {
  return bits_departed_in_second / link_rate_bps;
}

struct CausePercentiles {
  std::int64_t p5_ns = 0;
  std::int64_t p50_ns = 0;
  std::int64_t p95_ns = 0;
};

/// Drop counts and proportions r_x = n_x / n_tot. Fractions are absent
/// on an empty log rather than reported as 0/0.
struct DropAttribution {
  std::uint64_t n_DD = 0;
  std::uint64_t n_RD = 0;
  std::uint64_t n_BO = 0;
  std::uint64_t n_CoDel = 0;
  std::uint64_t n_tot = 0;
  std::optional<double> r_DD{};
  std::optional<double> r_RD{};
  std::optional<double> r_BO{};
  std::optional<double> r_CoDel{};
  std::map<aqm::DropCause, CausePercentiles> delay_at_drop{};
};

inline DropAttribution attribute_drops(std::span<const aqm::DropRecord> drops) {
  DropAttribution a;
  std::map<aqm::DropCause, std::vector<std::int64_t>> delays;
  for (const auto& d : drops) {
    switch (d.cause) {
      case aqm::DropCause::DeterministicDrop: ++a.n_DD; break;
      case aqm::DropCause::RandomDrop: ++a.n_RD; break;
      case aqm::DropCause::BufferOverflow: ++a.n_BO; break;
      case aqm::DropCause::CodelDrop: ++a.n_CoDel; break;
    }
    delays[d.cause].push_back(d.queuing_delay_at_drop.count());
  }
  a.n_tot = a.n_DD + a.n_RD + a.n_BO + a.n_CoDel;
  if (a.n_tot > 0) {
    const double tot = static_cast<double>(a.n_tot);
    a.r_DD = static_cast<double>(a.n_DD) / tot;
    a.r_RD = static_cast<double>(a.n_RD) / tot;
    a.r_BO = static_cast<double>(a.n_BO) / tot;
    a.r_CoDel = static_cast<double>(a.n_CoDel) / tot;
  }
  for (auto& [cause, v] : delays) {
    std::sort(v.begin(), v.end());
    std::span<const std::int64_t> s(v);
    a.delay_at_drop[cause] = CausePercentiles{
        percentile_sorted(s, 5.0), percentile_sorted(s, 50.0), percentile_sorted(s, 95.0)};
  }
  return a;
}

template <typename T>
double mean_of(std::span<const T> v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& x : v) sum += static_cast<double>(x);
  return sum / static_cast<double>(v.size());
}

}  // namespace aqmsim::metrics
