#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqmsim/netsim/scenario.hpp"
#include "aqmsim/time.hpp"

// JSON forms of the scenario and manifest. Durations serialize as strings
// with unit suffixes and parse from either a string or a bare ns integer,
// so parse -> serialize -> parse is the identity.

namespace aqmsim::cli {

inline nlohmann::json duration_to_json(Duration d) { return format_duration(d); }

inline Duration duration_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Duration(j.get<std::int64_t>());
  if (j.is_string()) return parse_duration(j.get<std::string>());
  throw ConfigError("expected duration string or integer ns: " + j.dump());
}

}  // namespace aqmsim::cli

namespace aqmsim::transport {

inline void to_json(nlohmann::json& j, const TcpConfig& c) {
  j = nlohmann::json{{"initial_window", c.initial_window},
                     {"mss_bytes", c.mss_bytes},
                     {"header_bytes", c.header_bytes},
                     {"ack_bytes", c.ack_bytes},
                     {"cubic_c", c.cubic_c},
                     {"cubic_beta", c.cubic_beta},
                     {"min_rto", cli::duration_to_json(c.min_rto)},
                     {"initial_rto", cli::duration_to_json(c.initial_rto)},
                     {"dupack_threshold", c.dupack_threshold}};
}

inline void from_json(const nlohmann::json& j, TcpConfig& c) {
  j.at("initial_window").get_to(c.initial_window);
  j.at("mss_bytes").get_to(c.mss_bytes);
  j.at("header_bytes").get_to(c.header_bytes);
  j.at("ack_bytes").get_to(c.ack_bytes);
  j.at("cubic_c").get_to(c.cubic_c);
  j.at("cubic_beta").get_to(c.cubic_beta);
  c.min_rto = cli::duration_from_json(j.at("min_rto"));
  c.initial_rto = cli::duration_from_json(j.at("initial_rto"));
  j.at("dupack_threshold").get_to(c.dupack_threshold);
}

inline void to_json(nlohmann::json& j, const CbrSpec& c) {
  j = nlohmann::json{{"rate_bps", c.rate_bps},
                     {"packet_bytes", c.packet_bytes},
                     {"start_window", cli::duration_to_json(c.start_window)}};
}

inline void from_json(const nlohmann::json& j, CbrSpec& c) {
  j.at("rate_bps").get_to(c.rate_bps);
  j.at("packet_bytes").get_to(c.packet_bytes);
  c.start_window = cli::duration_from_json(j.at("start_window"));
}

inline void to_json(nlohmann::json& j, const ShortFlowSpec& c) {
  j = nlohmann::json{{"size_set_bytes", c.size_set_bytes},
                     {"think_time_mean", cli::duration_to_json(c.think_time_mean)},
                     {"start_window", cli::duration_to_json(c.start_window)}};
}

inline void from_json(const nlohmann::json& j, ShortFlowSpec& c) {
  j.at("size_set_bytes").get_to(c.size_set_bytes);
  c.think_time_mean = cli::duration_from_json(j.at("think_time_mean"));
  c.start_window = cli::duration_from_json(j.at("start_window"));
}

}  // namespace aqmsim::transport

namespace aqmsim::netsim {

inline void to_json(nlohmann::json& j, const AqmConfig& c) {
  j = nlohmann::json{
      {"kind", std::string(to_string(c.kind))},
      {"target", cli::duration_to_json(c.pie.target)},
      {"update_interval", cli::duration_to_json(c.pie.update_interval)},
      {"alpha", c.pie.alpha},
      {"beta", c.pie.beta},
      {"max_burst", cli::duration_to_json(c.pie.max_burst)},
      {"prob_range_scaling", c.pie.prob_range_scaling},
      {"estimator",
       c.pie.estimator == aqm::DelayEstimator::Backlog ? "backlog" : "departure_rate"},
      {"tau_dd", cli::duration_to_json(c.tau_dd)},
      {"codel_target", cli::duration_to_json(c.codel.target)},
      {"codel_interval", cli::duration_to_json(c.codel.interval)},
      {"codel_mtu_bytes", c.codel.mtu_bytes}};
}

inline void from_json(const nlohmann::json& j, AqmConfig& c) {
  c.kind = aqm_kind_from_string(j.at("kind").get<std::string>());
  c.pie.target = cli::duration_from_json(j.at("target"));
  c.pie.update_interval = cli::duration_from_json(j.at("update_interval"));
  j.at("alpha").get_to(c.pie.alpha);
  j.at("beta").get_to(c.pie.beta);
  c.pie.max_burst = cli::duration_from_json(j.at("max_burst"));
  j.at("prob_range_scaling").get_to(c.pie.prob_range_scaling);
  const auto est = j.at("estimator").get<std::string>();
  if (est == "backlog") {
    c.pie.estimator = aqm::DelayEstimator::Backlog;
  } else if (est == "departure_rate") {
    c.pie.estimator = aqm::DelayEstimator::DepartureRate;
  } else {
    throw ConfigError("unknown estimator: " + est);
  }
  c.tau_dd = cli::duration_from_json(j.at("tau_dd"));
  c.codel.target = cli::duration_from_json(j.at("codel_target"));
  c.codel.interval = cli::duration_from_json(j.at("codel_interval"));
  j.at("codel_mtu_bytes").get_to(c.codel.mtu_bytes);
}

inline void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = nlohmann::json{
      {"preset", std::string(to_string(c.preset))},
      {"aqm", c.aqm},
      {"bottleneck_rate_bps", c.bottleneck_rate_bps},
      {"bottleneck_owd", cli::duration_to_json(c.bottleneck_owd)},
      {"access_rate_bps", c.access_rate_bps},
      {"access_owd", cli::duration_to_json(c.access_owd)},
      {"far_access_owd", cli::duration_to_json(c.far_access_owd)},
      {"flows",
       {{"cbr", c.near.cbr},
        {"sf", c.near.sf},
        {"ftp", c.near.ftp},
        {"cbr_far", c.far.cbr},
        {"sf_far", c.far.sf},
        {"ftp_far", c.far.ftp}}},
      {"duration", cli::duration_to_json(c.duration)},
      {"flow_start_window", cli::duration_to_json(c.flow_start_window)},
      {"seed", c.seed},
      {"replication", c.replication},
      {"tcp", c.tcp},
      {"cbr_traffic", c.cbr},
      {"shortflow", c.shortflow}};
  if (c.queue_capacity_bytes) {
    j["queue_capacity_bytes"] = *c.queue_capacity_bytes;
  } else {
    j["queue_capacity_bytes"] = nullptr;
  }
}

inline void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  c.preset = preset_from_string(j.at("preset").get<std::string>());
  j.at("aqm").get_to(c.aqm);
  j.at("bottleneck_rate_bps").get_to(c.bottleneck_rate_bps);
  c.bottleneck_owd = cli::duration_from_json(j.at("bottleneck_owd"));
  j.at("access_rate_bps").get_to(c.access_rate_bps);
  c.access_owd = cli::duration_from_json(j.at("access_owd"));
  c.far_access_owd = cli::duration_from_json(j.at("far_access_owd"));
  const auto& f = j.at("flows");
  f.at("cbr").get_to(c.near.cbr);
  f.at("sf").get_to(c.near.sf);
  f.at("ftp").get_to(c.near.ftp);
  f.at("cbr_far").get_to(c.far.cbr);
  f.at("sf_far").get_to(c.far.sf);
  f.at("ftp_far").get_to(c.far.ftp);
  if (j.contains("queue_capacity_bytes") && !j.at("queue_capacity_bytes").is_null()) {
    c.queue_capacity_bytes = j.at("queue_capacity_bytes").get<std::uint64_t>();
  } else {
    c.queue_capacity_bytes.reset();
  }
  c.duration = cli::duration_from_json(j.at("duration"));
  c.flow_start_window = cli::duration_from_json(j.at("flow_start_window"));
  j.at("seed").get_to(c.seed);
  j.at("replication").get_to(c.replication);
  j.at("tcp").get_to(c.tcp);
  j.at("cbr_traffic").get_to(c.cbr);
  j.at("shortflow").get_to(c.shortflow);
}

}  // namespace aqmsim::netsim

namespace aqmsim::cli {

enum class Emit { Csv, Json, Both };

constexpr std::string_view to_string(Emit e) {
  switch (e) {
    case Emit::Csv: return "csv";
    case Emit::Json: return "json";
    case Emit::Both: return "both";
  }
  return "?";
}

inline Emit emit_from_string(std::string_view s) {
  if (s == "csv") return Emit::Csv;
  if (s == "json") return Emit::Json;
  if (s == "both") return Emit::Both;
  throw ConfigError("unknown emit mode: " + std::string(s));
}

/// One batch: a scenario, how many seeded replications, and where results go.
/// Replication i runs with seed = base_seed + i.
struct RunManifest {
  netsim::ScenarioConfig scenario{};
  std::uint32_t replications = 20;
  std::uint64_t base_seed = 1;
  std::string output_dir{};
  Emit emit = Emit::Both;
  std::uint32_t jobs = 0;  // 0: hardware concurrency

  void validate() const {
    scenario.validate();
    if (replications == 0) throw ConfigError("replications must be >= 1");
    if (output_dir.empty()) throw ConfigError("output_dir is required");
  }
};

inline void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"scenario", m.scenario},
                     {"replications", m.replications},
                     {"base_seed", m.base_seed},
                     {"output_dir", m.output_dir},
                     {"emit", std::string(to_string(m.emit))},
                     {"jobs", m.jobs}};
}

inline void from_json(const nlohmann::json& j, RunManifest& m) {
  j.at("scenario").get_to(m.scenario);
  j.at("replications").get_to(m.replications);
  j.at("base_seed").get_to(m.base_seed);
  j.at("output_dir").get_to(m.output_dir);
  m.emit = emit_from_string(j.at("emit").get<std::string>());
  if (j.contains("jobs")) j.at("jobs").get_to(m.jobs);
}

}  // namespace aqmsim::cli
