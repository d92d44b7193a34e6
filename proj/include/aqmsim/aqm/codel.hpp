#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "aqmsim/aqm/drop.hpp"
#include "aqmsim/packet.hpp"
#include "aqmsim/time.hpp"

namespace aqmsim::aqm {

struct CodelConfig {
  Duration target = std::chrono::milliseconds(5);
  Duration interval = std::chrono::milliseconds(100);
  std::uint32_t mtu_bytes = 1500;  // backlog exemption: no drops at <= one MTU
};

struct CodelState {
  bool dropping = false;
  std::uint32_t drop_count = 0;      // >= 1 whenever dropping
  SimTime next_drop_at{};            // while dropping: time of the next head drop
  std::optional<SimTime> first_above_at{};  // when sojourn first stayed above target
};

/// Head-drop spacing: interval / sqrt(count), rounded to nearest ns.
inline Duration codel_drop_spacing(const CodelConfig& cfg, std::uint32_t count) {
  const double ns = static_cast<double>(cfg.interval.count()) /
                    std::sqrt(static_cast<double>(count));
  return Duration(static_cast<std::int64_t>(std::llround(ns)));
}

namespace detail {

struct CodelPop {
  std::optional<Packet> pkt{};
  bool ok_to_drop = false;
};

inline CodelPop codel_pop(CodelState& st, const CodelConfig& cfg, PacketFifo& q, SimTime now) {
  CodelPop r;
  if (q.empty()) {
    st.first_above_at.reset();
    return r;
  }
  r.pkt = q.pop();
  const Duration sojourn = now - r.pkt->enqueue_ts;
  if (sojourn < cfg.target || q.bytes() + r.pkt->wire_bytes <= cfg.mtu_bytes) {
    // Went (or stayed) below: out of drop consideration for a full interval.
    st.first_above_at.reset();
  } else if (!st.first_above_at) {
    st.first_above_at = now;
  } else if (now - *st.first_above_at >= cfg.interval) {
    r.ok_to_drop = true;
  }
  return r;
}

}  // namespace detail

/// One transmit opportunity of the bottleneck link. Pops the head packet,
/// runs the standard CoDel control law, reports each dropped head through
/// `on_drop(pkt, sojourn)`, and returns the packet to put on the wire (or
/// nullopt when the queue drained).
template <typename DropFn>
std::optional<Packet> codel_dequeue(CodelState& st, const CodelConfig& cfg, PacketFifo& q,
                                    SimTime now, DropFn&& on_drop) {
  auto drop = [&](Packet& p) { on_drop(p, now - p.enqueue_ts); };

  detail::CodelPop r = detail::codel_pop(st, cfg, q, now);
  if (!r.pkt) {
    st.dropping = false;
    return std::nullopt;
  }
  if (st.dropping) {
    if (!r.ok_to_drop) {
      st.dropping = false;
    } else {
      while (st.dropping && now >= st.next_drop_at) {
        drop(*r.pkt);
        ++st.drop_count;
        r = detail::codel_pop(st, cfg, q, now);
        if (!r.pkt) {
          st.dropping = false;
          return std::nullopt;
        }
        if (!r.ok_to_drop) {
          st.dropping = false;
        } else {
          st.next_drop_at = st.next_drop_at + codel_drop_spacing(cfg, st.drop_count);
        }
      }
    }
  } else if (r.ok_to_drop) {
    drop(*r.pkt);
    r = detail::codel_pop(st, cfg, q, now);
    st.dropping = true;
    // Re-entering soon after the last cycle keeps most of the drop rate.
    if (now - st.next_drop_at < 16 * cfg.interval && st.drop_count > 2) {
      st.drop_count -= 2;
    } else {
      st.drop_count = 1;
    }
    st.next_drop_at = now + codel_drop_spacing(cfg, st.drop_count);
    if (!r.pkt) {
      st.dropping = false;
      return std::nullopt;
    }
  }
  return std::move(r.pkt);
}

}  // namespace aqmsim::aqm
