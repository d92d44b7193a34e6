#pragma once

#include "aqmsim/aqm/pie.hpp"

namespace aqmsim::aqm {

struct MadpieConfig {
  PieConfig pie{};
  Duration tau_dd = std::chrono::milliseconds(30);  // deterministic-drop threshold
};

/// PIE plus the single-bit deterministic drop policy. p_max arms at an
/// update tick when E[T] > tau_dd and is consumed by at most one drop,
/// so there can be at most one deterministic drop per update interval.
struct MadpieState {
  PieState pie{};
  bool p_max = false;
};

inline MadpieState make_madpie_state(const MadpieConfig& cfg) {
  return MadpieState{make_pie_state(cfg.pie), false};
}

/// Runs the PIE tick, then arms p_max on strict E[T] > tau_dd.
/// An armed, unconsumed p_max stays armed; only a drop clears it.
inline void madpie_update(MadpieState& st, const MadpieConfig& cfg) {
  pie_update(st.pie, cfg.pie);
  if (st.pie.est_delay > cfg.tau_dd) st.p_max = true;
}

/// The random policy runs first with the same draw PIE would use; only a
/// packet it admits can be taken by the deterministic policy. Burst
/// allowance does not shield deterministic drops.
inline EnqueueDecision madpie_enqueue_decision(MadpieState& st, std::uint32_t pkt_bytes,
                                               std::uint64_t capacity_bytes, double u) {
  if (auto cause = pie_classify(st.pie, pkt_bytes, capacity_bytes, u)) {
    return EnqueueDecision::reject(*cause);
  }
  if (st.p_max) {
    st.p_max = false;
    return EnqueueDecision::reject(DropCause::DeterministicDrop);
  }
  st.pie.queue_bytes += pkt_bytes;
  return EnqueueDecision::accept();
}

inline void madpie_on_dequeue(MadpieState& st, std::uint32_t pkt_bytes) {
  pie_on_dequeue(st.pie, pkt_bytes);
}

}  // namespace aqmsim::aqm
