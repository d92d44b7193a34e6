#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqmsim/cli/config_io.hpp"
#include "aqmsim/metrics/collector.hpp"
#include "aqmsim/metrics/stats.hpp"
#include "aqmsim/netsim/scenario.hpp"

namespace aqmsim::cli {

constexpr int kSchemaVersion = 1;

/// Nearest-rank distribution summary plus a 0..100 percentile grid for
/// CDF overlays downstream.
template <typename T>
nlohmann::json dist_json(std::vector<T> samples, bool with_grid = true) {
  nlohmann::json j;
  j["count"] = samples.size();
  if (samples.empty()) return j;
  std::sort(samples.begin(), samples.end());
  const std::span<const T> s(samples);
  j["mean"] = metrics::mean_of(s);
  j["min"] = samples.front();
  j["max"] = samples.back();
  for (const double q : {5.0, 25.0, 50.0, 75.0, 90.0, 95.0, 99.0}) {
    j["p" + std::to_string(static_cast<int>(q))] = metrics::percentile_sorted(s, q);
  }
  if (with_grid) {
    std::vector<T> grid(101);
    for (int q = 0; q <= 100; ++q) {
      grid[static_cast<std::size_t>(q)] =
          metrics::percentile_sorted(s, static_cast<double>(q));
    }
    j["grid"] = grid;
  }
  return j;
}

inline nlohmann::json attribution_json(const metrics::DropAttribution& a) {
  nlohmann::json j;
  j["n_DD"] = a.n_DD;
  j["n_RD"] = a.n_RD;
  j["n_BO"] = a.n_BO;
  j["n_CoDel"] = a.n_CoDel;
  j["n_tot"] = a.n_tot;
  auto frac = [](const std::optional<double>& r) {
    return r ? nlohmann::json(*r) : nlohmann::json(nullptr);
  };
  j["r_DD"] = frac(a.r_DD);
  j["r_RD"] = frac(a.r_RD);
  j["r_BO"] = frac(a.r_BO);
  j["r_CoDel"] = frac(a.r_CoDel);
  nlohmann::json per_cause = nlohmann::json::object();
  for (const auto& [cause, p] : a.delay_at_drop) {
    per_cause[std::string(aqm::to_string(cause))] = {
        {"p5_ns", p.p5_ns}, {"p50_ns", p.p50_ns}, {"p95_ns", p.p95_ns}};
  }
  j["delay_at_drop_ns"] = per_cause;
  return j;
}

/// Pooled summary over one or more replications of the same scenario.
inline nlohmann::json build_summary(const netsim::ScenarioConfig& scenario,
                                    std::span<const metrics::MetricSeries> reps) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = scenario;
  j["replications"] = reps.size();

  std::vector<std::uint64_t> seeds;
  std::uint64_t events = 0;
  for (const auto& r : reps) {
    seeds.push_back(r.seed);
    events += r.events_processed;
  }
  j["seeds"] = seeds;
  j["events_processed"] = events;

  const auto& classes = reps.front().class_names;
  j["classes"] = classes;

  std::vector<std::int64_t> qdelay_all;
  std::vector<std::vector<std::int64_t>> qdelay_cls(classes.size());
  for (const auto& r : reps) {
    for (const auto& s : r.qdelay) {
      qdelay_all.push_back(s.delay.count());
      qdelay_cls[s.cls].push_back(s.delay.count());
    }
  }
  j["queuing_delay_ns"] = dist_json(std::move(qdelay_all));
  nlohmann::json by_class = nlohmann::json::object();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    by_class[classes[c]] = dist_json(std::move(qdelay_cls[c]));
  }
  j["queuing_delay_by_class_ns"] = by_class;

  std::vector<std::int64_t> owd_all;
  for (const auto& r : reps) {
    for (const auto& s : r.owd) owd_all.push_back(s.delay.count());
  }
  j["one_way_delay_ns"] = dist_json(std::move(owd_all), /*with_grid=*/false);

  std::vector<double> util_all;
  for (const auto& r : reps) util_all.insert(util_all.end(), r.util.begin(), r.util.end());
  j["utilization"] = dist_json(std::move(util_all), /*with_grid=*/false);

  nlohmann::json goodput = nlohmann::json::object();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::int64_t> samples;  // per-second per-class bits
    for (const auto& r : reps) {
      for (const std::uint64_t bits : r.goodput_bits[c]) {
        samples.push_back(static_cast<std::int64_t>(bits));
      }
    }
    goodput[classes[c]] = dist_json(std::move(samples));
  }
  j["goodput_bps"] = goodput;

  std::vector<aqm::DropRecord> drops_all;
  for (const auto& r : reps) {
    drops_all.insert(drops_all.end(), r.drops.begin(), r.drops.end());
  }
  j["drops"] = attribution_json(metrics::attribute_drops(drops_all));

  std::map<std::uint64_t, std::vector<std::int64_t>> dl_by_size;
  std::map<std::uint64_t, std::uint64_t> truncated_by_size;
  for (const auto& r : reps) {
    for (const auto& d : r.downloads) {
      if (d.completed) {
        dl_by_size[d.size_bytes].push_back(d.duration.count());
      } else {
        ++truncated_by_size[d.size_bytes];
      }
    }
  }
  nlohmann::json downloads = nlohmann::json::object();
  for (auto& [size, durations] : dl_by_size) {
    nlohmann::json d = dist_json(std::move(durations), /*with_grid=*/false);
    d["truncated"] = truncated_by_size[size];
    downloads[std::to_string(size)] = d;
  }
  for (const auto& [size, n] : truncated_by_size) {
    const std::string key = std::to_string(size);
    if (!downloads.contains(key)) downloads[key] = {{"count", 0}, {"truncated", n}};
  }
  j["downloads"] = downloads;

  metrics::QueueCounters q{};
  for (const auto& r : reps) {
    q.offered += r.queue.offered;
    q.delivered += r.queue.delivered;
    q.dropped += r.queue.dropped;
    q.resident += r.queue.resident;
  }
  j["queue"] = {{"offered", q.offered},
                {"delivered", q.delivered},
                {"dropped", q.dropped},
                {"resident", q.resident}};
  metrics::TransportCounters tcp{};
  for (const auto& r : reps) {
    tcp.packets_sent += r.tcp.packets_sent;
    tcp.retransmits += r.tcp.retransmits;
    tcp.timeouts += r.tcp.timeouts;
    tcp.recoveries += r.tcp.recoveries;
  }
  j["tcp"] = {{"packets_sent", tcp.packets_sent},
              {"retransmits", tcp.retransmits},
              {"timeouts", tcp.timeouts},
              {"recoveries", tcp.recoveries}};
  return j;
}

}  // namespace aqmsim::cli
