#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <utility>

#include "aqmsim/engine.hpp"
#include "aqmsim/packet.hpp"
#include "aqmsim/time.hpp"

namespace aqmsim::netsim {

using PacketSink = std::function<void(Packet&&)>;

/// Unbounded store-and-forward FIFO pipe: packets serialize at `rate_bps`
/// one after another, then propagate for `owd`. Because nothing is dropped
/// or reordered here, the delivery instant is known at send time and each
/// traversal costs a single event.
///
/// FIFO contract: arrival instants passed to send_at() must be
/// non-decreasing. Calls made from engine handlers in event order satisfy
/// this automatically for send().
class Link {
 public:
  Link(Engine& eng, std::uint64_t rate_bps, Duration owd)
      : eng_(eng), rate_bps_(rate_bps), owd_(owd) {}

  void set_sink(PacketSink sink) { sink_ = std::move(sink); }

  void send(Packet&& p) { send_at(std::move(p), eng_.now()); }

  /// Hand over a packet that reaches this link's head at `arrival`
  /// (>= now); used to chain hops without intermediate events.
  void send_at(Packet&& p, SimTime arrival) {
    assert(arrival >= eng_.now());
    assert(arrival >= last_arrival_);
    last_arrival_ = arrival;
    const SimTime start = std::max(arrival, busy_until_);
    const SimTime done = start + transmission_time(p.wire_bytes, rate_bps_);
    busy_until_ = done;
    eng_.schedule_at(done + owd_, [this, pkt = std::move(p)]() mutable {
      sink_(std::move(pkt));
    });
  }

  /// When the wire frees up for a packet arriving at `arrival`.
  SimTime departure_after(SimTime arrival, std::uint32_t wire_bytes) const {
    return std::max(arrival, busy_until_) + transmission_time(wire_bytes, rate_bps_);
  }

  SimTime busy_until() const { return busy_until_; }
  Duration owd() const { return owd_; }
  std::uint64_t rate_bps() const { return rate_bps_; }

 private:
  Engine& eng_;
  std::uint64_t rate_bps_;
  Duration owd_;
  SimTime busy_until_{};
  SimTime last_arrival_{};
  PacketSink sink_;
};

}  // namespace aqmsim::netsim
