#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "aqmsim/aqm/codel.hpp"
#include "aqmsim/aqm/madpie.hpp"
#include "aqmsim/aqm/pie.hpp"
#include "aqmsim/error.hpp"
#include "aqmsim/time.hpp"
#include "aqmsim/transport/cbr.hpp"
#include "aqmsim/transport/cubic.hpp"
#include "aqmsim/transport/shortflow.hpp"

namespace aqmsim::netsim {

enum class Preset { ProofOfConcept, TrafficMix, RttMix, Custom };
enum class AqmKind { DropTail, Pie, Madpie, Codel };

constexpr std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::ProofOfConcept: return "proof_of_concept";
    case Preset::TrafficMix: return "traffic_mix";
    case Preset::RttMix: return "rtt_mix";
    case Preset::Custom: return "custom";
  }
  return "?";
}

inline Preset preset_from_string(std::string_view s) {
  if (s == "proof_of_concept") return Preset::ProofOfConcept;
  if (s == "traffic_mix") return Preset::TrafficMix;
  if (s == "rtt_mix") return Preset::RttMix;
  if (s == "custom") return Preset::Custom;
  throw ConfigError("unknown preset: " + std::string(s));
}

constexpr std::string_view to_string(AqmKind k) {
  switch (k) {
    case AqmKind::DropTail: return "dt";
    case AqmKind::Pie: return "pie";
    case AqmKind::Madpie: return "madpie";
    case AqmKind::Codel: return "codel";
  }
  return "?";
}

inline AqmKind aqm_kind_from_string(std::string_view s) {
  if (s == "dt" || s == "droptail") return AqmKind::DropTail;
  if (s == "pie") return AqmKind::Pie;
  if (s == "madpie") return AqmKind::Madpie;
  if (s == "codel") return AqmKind::Codel;
  throw ConfigError("unknown aqm: " + std::string(s));
}

/// Discipline selection plus every tunable of the selected discipline.
struct AqmConfig {
  AqmKind kind = AqmKind::Pie;
  aqm::PieConfig pie{};
  Duration tau_dd = std::chrono::milliseconds(30);  // MADPIE threshold
  aqm::CodelConfig codel{};

  aqm::MadpieConfig madpie() const { return aqm::MadpieConfig{pie, tau_dd}; }
};

struct FlowCounts {
  int cbr = 0;
  int sf = 0;
  int ftp = 0;

  int total() const { return cbr + sf + ftp; }
  bool operator==(const FlowCounts&) const = default;
};

/// Everything a single run needs: the dumbbell's link parameters, flow
/// populations (near group, plus a far group with a longer sender-side
/// access path for the RTT-mix setup), the AQM and its knobs, and the seed.
struct ScenarioConfig {
  Preset preset = Preset::Custom;
  AqmConfig aqm{};

  std::uint64_t bottleneck_rate_bps = 10'000'000;
  Duration bottleneck_owd = std::chrono::milliseconds(248);  // d
  std::uint64_t access_rate_bps = 100'000'000;
  Duration access_owd = std::chrono::milliseconds(1);
  Duration far_access_owd = std::chrono::milliseconds(201);

  FlowCounts near{};
  FlowCounts far{};

  std::optional<std::uint64_t> queue_capacity_bytes{};  // default: BDP
  Duration duration = std::chrono::seconds(300);
  Duration flow_start_window = std::chrono::seconds(1);  // bulk-flow start jitter
  std::uint64_t seed = 1;
  std::uint32_t replication = 0;

  transport::TcpConfig tcp{};
  transport::CbrSpec cbr{};
  transport::ShortFlowSpec shortflow{};

  Duration base_rtt_near() const { return 2 * (access_owd + bottleneck_owd + access_owd); }
  Duration base_rtt_far() const { return 2 * (far_access_owd + bottleneck_owd + access_owd); }

  Duration max_base_rtt() const {
    return far.total() > 0 ? std::max(base_rtt_near(), base_rtt_far()) : base_rtt_near();
  }

  /// Queue size: the BDP of the highest base RTT unless overridden.
  std::uint64_t effective_queue_capacity() const {
    if (queue_capacity_bytes) return *queue_capacity_bytes;
    const auto rtt_ns = static_cast<std::uint64_t>(max_base_rtt().count());
    return bottleneck_rate_bps * rtt_ns / 8'000'000'000ull;
  }

  void validate() const {
    if (bottleneck_rate_bps == 0 || access_rate_bps == 0) {
      throw ConfigError("link rates must be positive");
    }
    if (bottleneck_owd < Duration{0} || access_owd < Duration{0} ||
        far_access_owd < Duration{0}) {
      throw ConfigError("propagation delays must be non-negative");
    }
    if (near.cbr < 0 || near.sf < 0 || near.ftp < 0 || far.cbr < 0 || far.sf < 0 ||
        far.ftp < 0) {
      throw ConfigError("flow counts must be non-negative");
    }
    if (near.total() + far.total() == 0) throw ConfigError("no flows configured");
    if (duration <= Duration{0}) throw ConfigError("duration must be positive");
    if (effective_queue_capacity() == 0) throw ConfigError("queue capacity must be positive");
    if (aqm.pie.target <= Duration{0} || aqm.pie.update_interval <= Duration{0}) {
      throw ConfigError("pie target and update interval must be positive");
    }
    if (aqm.pie.alpha < 0 || aqm.pie.beta < 0) throw ConfigError("pie gains must be >= 0");
    if (aqm.pie.max_burst < Duration{0}) throw ConfigError("max_burst must be >= 0");
    if (aqm.kind == AqmKind::Madpie && aqm.tau_dd < aqm.pie.target) {
      throw ConfigError("tau_dd must be >= pie target");
    }
    if (aqm.kind == AqmKind::Codel &&
        (aqm.codel.target <= Duration{0} || aqm.codel.target >= aqm.codel.interval)) {
      throw ConfigError("codel requires 0 < target < interval");
    }
    if (shortflow.size_set_bytes.empty() && (near.sf > 0 || far.sf > 0)) {
      throw ConfigError("short-flow size set is empty");
    }
  }
};

/// 10 bulk CUBIC flows over one bottleneck, 300 s. d = 48 ms or 248 ms
/// (base RTT 100 ms / 500 ms). MADPIE threshold 30 ms.
inline ScenarioConfig proof_of_concept_preset(
    AqmKind kind, Duration d = std::chrono::milliseconds(248)) {
  ScenarioConfig cfg;
  cfg.preset = Preset::ProofOfConcept;
  cfg.aqm.kind = kind;
  cfg.aqm.tau_dd = std::chrono::milliseconds(30);
  cfg.bottleneck_owd = d;
  cfg.near = FlowCounts{0, 0, 10};
  cfg.duration = std::chrono::seconds(300);
  return cfg;
}

/// 4 CBR + 20 short-flow + 10 bulk flows, 100 s, d in {48,148,248} ms.
/// MADPIE threshold 25 ms.
inline ScenarioConfig traffic_mix_preset(AqmKind kind,
                                         Duration d = std::chrono::milliseconds(248)) {
  ScenarioConfig cfg;
  cfg.preset = Preset::TrafficMix;
  cfg.aqm.kind = kind;
  cfg.aqm.tau_dd = std::chrono::milliseconds(25);
  cfg.bottleneck_owd = d;
  cfg.near = FlowCounts{4, 20, 10};
  cfg.duration = std::chrono::seconds(100);
  return cfg;
}

/// Two sender groups (base RTT 100 ms and 500 ms) sharing a 48 ms
/// bottleneck; queue sized to the BDP of the higher RTT.
inline ScenarioConfig rtt_mix_preset(AqmKind kind) {
  ScenarioConfig cfg;
  cfg.preset = Preset::RttMix;
  cfg.aqm.kind = kind;
  cfg.aqm.tau_dd = std::chrono::milliseconds(25);
  cfg.bottleneck_owd = std::chrono::milliseconds(48);
  cfg.near = FlowCounts{4, 20, 2};
  cfg.far = FlowCounts{4, 20, 2};
  cfg.duration = std::chrono::seconds(100);
  return cfg;
}

inline ScenarioConfig preset_config(Preset p, AqmKind kind) {
  switch (p) {
    case Preset::ProofOfConcept: return proof_of_concept_preset(kind);
    case Preset::TrafficMix: return traffic_mix_preset(kind);
    case Preset::RttMix: return rtt_mix_preset(kind);
    case Preset::Custom: break;
  }
  ScenarioConfig cfg;
  cfg.preset = Preset::Custom;
  cfg.aqm.kind = kind;
  return cfg;
}

}  // namespace aqmsim::netsim
