#pragma once

#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "aqmsim/cli/config_io.hpp"
#include "aqmsim/cli/summary.hpp"
#include "aqmsim/metrics/collector.hpp"
#include "aqmsim/netsim/build.hpp"

namespace aqmsim::cli {

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 config error, 3 I/O error
  std::string error{};
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_qdelay_csv(const std::filesystem::path& path,
                             const metrics::MetricSeries& s) {
  std::string buf = "time_ns,delay_ns\n";
  char line[64];
  for (const auto& q : s.qdelay) {
    std::snprintf(line, sizeof line, "%" PRId64 ",%" PRId64 "\n", q.at.ns(),
                  q.delay.count());
    buf += line;
  }
  write_text(path, buf);
}

inline void write_owd_csv(const std::filesystem::path& path, const metrics::MetricSeries& s) {
  std::string buf = "time_ns,delay_ns\n";
  char line[64];
  for (const auto& q : s.owd) {
    std::snprintf(line, sizeof line, "%" PRId64 ",%" PRId64 "\n", q.at.ns(),
                  q.delay.count());
    buf += line;
  }
  write_text(path, buf);
}

inline void write_util_csv(const std::filesystem::path& path, const metrics::MetricSeries& s) {
  std::string buf = "second,fraction\n";
  char line[64];
  for (std::size_t sec = 0; sec < s.util.size(); ++sec) {
    std::snprintf(line, sizeof line, "%zu,%.9f\n", sec, s.util[sec]);
    buf += line;
  }
  write_text(path, buf);
}

inline void write_goodput_csv(const std::filesystem::path& path,
                              const metrics::MetricSeries& s) {
  std::string buf = "second,class,bps\n";
  char line[96];
  for (std::size_t c = 0; c < s.class_names.size(); ++c) {
    for (std::size_t sec = 0; sec < s.goodput_bits[c].size(); ++sec) {
      std::snprintf(line, sizeof line, "%zu,%s,%" PRIu64 "\n", sec,
                    s.class_names[c].c_str(), s.goodput_bits[c][sec]);
      buf += line;
    }
  }
  write_text(path, buf);
}

inline void write_drops_csv(const std::filesystem::path& path, const metrics::MetricSeries& s) {
  std::string buf = "time_ns,cause,delay_at_drop_ns,flow\n";
  char line[96];
  for (const auto& d : s.drops) {
    std::snprintf(line, sizeof line, "%" PRId64 ",%s,%" PRId64 ",%u\n", d.at.ns(),
                  std::string(aqm::to_string(d.cause)).c_str(),
                  d.queuing_delay_at_drop.count(), d.flow);
    buf += line;
  }
  write_text(path, buf);
}

inline void write_downloads_csv(const std::filesystem::path& path,
                                const metrics::MetricSeries& s) {
  std::string buf = "flow,size_bytes,duration_ns\n";
  char line[96];
  for (const auto& d : s.downloads) {
    if (!d.completed) continue;  // truncated transfers are summarized, not listed
    std::snprintf(line, sizeof line, "%u,%" PRIu64 ",%" PRId64 "\n", d.flow, d.size_bytes,
                  d.duration.count());
    buf += line;
  }
  write_text(path, buf);
}

inline void write_replication(const std::filesystem::path& dir,
                              const netsim::ScenarioConfig& cfg,
                              const metrics::MetricSeries& s, Emit emit) {
  std::filesystem::create_directories(dir);
  if (emit == Emit::Csv || emit == Emit::Both) {
    write_qdelay_csv(dir / "qdelay.csv", s);
    write_util_csv(dir / "util.csv", s);
    write_goodput_csv(dir / "goodput.csv", s);
    write_drops_csv(dir / "drops.csv", s);
    write_downloads_csv(dir / "downloads.csv", s);
    write_owd_csv(dir / "owd.csv", s);
  }
  if (emit == Emit::Json || emit == Emit::Both) {
    const nlohmann::json j = build_summary(cfg, std::span(&s, 1));
    write_text(dir / "summary.json", j.dump(2) + "\n");
  }
}

inline std::string rep_dir_name(std::uint32_t i) {
  char name[16];
  std::snprintf(name, sizeof name, "rep_%03u", i);
  return name;
}

}  // namespace detail

/// Executes every replication (seed = base_seed + i), writes per-rep
/// artifacts, then the pooled aggregate. Replications are independent
/// simulation instances; up to `jobs` run concurrently.
inline RunOutcome run_manifest(const RunManifest& manifest) {
  try {
    manifest.validate();
  } catch (const ConfigError& e) {
    return {2, e.what()};
  }
  try {
    const std::filesystem::path out(manifest.output_dir);
    std::filesystem::create_directories(out);

    const std::uint32_t n = manifest.replications;
    std::vector<metrics::MetricSeries> results(n);
    std::vector<std::string> errors(n);
    std::atomic<std::uint32_t> next{0};

    auto worker = [&] {
      while (true) {
        const std::uint32_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          netsim::ScenarioConfig cfg = manifest.scenario;
          cfg.seed = manifest.base_seed + i;
          cfg.replication = i;
          netsim::Simulation sim(cfg);
          results[i] = sim.run();
          detail::write_replication(out / detail::rep_dir_name(i), cfg, results[i],
                                    manifest.emit);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    };

    std::uint32_t jobs = manifest.jobs ? manifest.jobs : std::thread::hardware_concurrency();
    jobs = std::max<std::uint32_t>(1, std::min(jobs, n));
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::uint32_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (const auto& err : errors) {
      if (!err.empty()) return {3, err};
    }

    netsim::ScenarioConfig base = manifest.scenario;
    base.seed = manifest.base_seed;
    nlohmann::json agg = build_summary(base, results);
    agg["base_seed"] = manifest.base_seed;
    detail::write_text(out / "aggregate.json", agg.dump(2) + "\n");
    detail::write_text(out / "manifest.json", nlohmann::json(manifest).dump(2) + "\n");
    return {0, {}};
  } catch (const ConfigError& e) {
    return {2, e.what()};
  } catch (const std::exception& e) {
    return {3, e.what()};
  }
}

}  // namespace aqmsim::cli
