#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "aqmsim/engine.hpp"
#include "aqmsim/packet.hpp"
#include "aqmsim/time.hpp"

namespace aqmsim::transport {

/// VoIP-like constant bit-rate UDP traffic. The 218 B are wire bytes; the
/// whole packet counts as delivered payload so an unthrottled flow reads
/// back its nominal sending rate.
struct CbrSpec {
  std::uint64_t rate_bps = 87'000;
  std::uint32_t packet_bytes = 218;
  Duration start_window = std::chrono::seconds(1);
};

/// Constant inter-departure gap, nearest-ns: packet_bytes * 8 / rate.
inline Duration cbr_gap(const CbrSpec& spec) {
  return transmission_time(spec.packet_bytes, spec.rate_bps);
}

inline SimTime cbr_next_departure(const CbrSpec& spec, SimTime last) {
  return last + cbr_gap(spec);
}

class CbrSource {
 public:
  CbrSource(Engine& eng, const CbrSpec& spec, std::uint32_t flow, std::uint32_t cls,
            std::function<void(Packet&&)> out)
      : eng_(eng), spec_(spec), flow_(flow), cls_(cls), out_(std::move(out)) {}

  void start(SimTime at) {
    eng_.schedule_at(at, [this] { emit(); });
  }

 private:
  void emit() {
    Packet p;
    p.flow = flow_;
    p.cls = cls_;
    p.wire_bytes = spec_.packet_bytes;
    p.payload_bytes = spec_.packet_bytes;
    p.seq = seq_++;
    p.origin_ts = eng_.now();
    out_(std::move(p));
    eng_.schedule_at(cbr_next_departure(spec_, eng_.now()), [this] { emit(); });
  }

  Engine& eng_;
  CbrSpec spec_;
  std::uint32_t flow_;
  std::uint32_t cls_;
  std::function<void(Packet&&)> out_;
  std::uint64_t seq_ = 0;
};

}  // namespace aqmsim::transport
