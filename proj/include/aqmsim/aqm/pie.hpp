#pragma once

#include <algorithm>
#include <cstdint>

#include "aqmsim/aqm/drop.hpp"
#include "aqmsim/time.hpp"

namespace aqmsim::aqm {

/// How the controller estimates the queuing delay at update ticks.
/// Backlog mode applies Little's law against the configured drain rate,
/// which is exact for a dedicated bottleneck and fully deterministic.
/// DepartureRate mirrors deployed PIE's measured-rate estimator.
enum class DelayEstimator { Backlog, DepartureRate };

struct PieConfig {
  Duration target = std::chrono::milliseconds(20);           // tau
  Duration update_interval = std::chrono::milliseconds(30);  // lambda
  double alpha = 0.125;  // 1/s, gain on (E[T] - tau)
  double beta = 1.25;    // 1/s, gain on (E[T] - E[T]_old)
  Duration max_burst = std::chrono::milliseconds(100);
  bool prob_range_scaling = true;
  DelayEstimator estimator = DelayEstimator::Backlog;
};

struct PieState {
  double p_drop = 0.0;
  Duration est_delay{0};      // E[T], refreshed by the owner before updates
  Duration est_delay_old{0};  // E[T]_old
  Duration burst_remaining{0};
  std::uint64_t queue_bytes = 0;
};

inline PieState make_pie_state(const PieConfig& cfg) {
  PieState st;
  st.burst_remaining = cfg.max_burst;
  return st;
}

/// Little's-law backlog estimate: queue_bytes * 8 / drain_rate.
inline Duration pie_estimate_delay(std::uint64_t queue_bytes, std::uint64_t drain_rate_bps) {
  return transmission_time(queue_bytes, drain_rate_bps);
}

/// Gain reduction at small drop probabilities, as deployed PIE does.
inline double pie_gain_scale(double p_drop) {
  if (p_drop < 0.01) return 0.125;
  if (p_drop < 0.1) return 0.5;
  return 1.0;
}

/// One lambda tick. Expects state.est_delay already refreshed.
/// p_drop <- clamp01(p_drop + alpha*(E[T]-tau) + beta*(E[T]-E[T]_old)),
/// delays in seconds; burst allowance decays by lambda and is refreshed
/// once the controller is fully quiescent.
inline void pie_update(PieState& st, const PieConfig& cfg) {
  const double est = to_seconds(st.est_delay);
  const double est_old = to_seconds(st.est_delay_old);
  double delta = cfg.alpha * (est - to_seconds(cfg.target)) + cfg.beta * (est - est_old);
  if (cfg.prob_range_scaling) delta *= pie_gain_scale(st.p_drop);
  st.p_drop = std::clamp(st.p_drop + delta, 0.0, 1.0);

  st.burst_remaining = std::max(Duration{0}, st.burst_remaining - cfg.update_interval);
  const Duration half_target = cfg.target / 2;
  if (st.p_drop == 0.0 && st.est_delay < half_target && st.est_delay_old < half_target) {
    st.burst_remaining = cfg.max_burst;
  }

  st.est_delay_old = st.est_delay;
}

/// Admission check only; no state change.
inline std::optional<DropCause> pie_classify(const PieState& st, std::uint32_t pkt_bytes,
                                             std::uint64_t capacity_bytes, double u) {
  if (st.queue_bytes + pkt_bytes > capacity_bytes) return DropCause::BufferOverflow;
  if (st.burst_remaining > Duration{0}) return std::nullopt;
  if (u <= st.p_drop) return DropCause::RandomDrop;
  return std::nullopt;
}

/// Full buffer wins over the random policy; while burst allowance remains
/// the random policy never drops. `u` must come from the simulation PRNG.
inline EnqueueDecision pie_enqueue_decision(PieState& st, std::uint32_t pkt_bytes,
                                            std::uint64_t capacity_bytes, double u) {
  if (auto cause = pie_classify(st, pkt_bytes, capacity_bytes, u)) {
    return EnqueueDecision::reject(*cause);
  }
  st.queue_bytes += pkt_bytes;
  return EnqueueDecision::accept();
}

inline void pie_on_dequeue(PieState& st, std::uint32_t pkt_bytes) {
  st.queue_bytes -= pkt_bytes;
}

/// Measured-departure-rate delay estimator (optional PIE mode).
/// Starts a measurement cycle once the backlog reaches the threshold,
/// smooths rate samples 7/8-to-1/8, and reads E[T] = backlog / avg rate.
class DepartureRateEstimator {
 public:
  static constexpr std::uint64_t kThresholdBytes = 16384;

  void on_dequeue(std::uint64_t queue_bytes_after, std::uint32_t pkt_bytes, SimTime now) {
    if (!in_cycle_ && queue_bytes_after + pkt_bytes >= kThresholdBytes) {
      in_cycle_ = true;
      cycle_start_ = now;
      cycle_bytes_ = 0;
    }
    if (!in_cycle_) return;
    cycle_bytes_ += pkt_bytes;
    if (cycle_bytes_ >= kThresholdBytes) {
      const Duration dt = now - cycle_start_;
      if (dt > Duration{0}) {
        const double sample = static_cast<double>(cycle_bytes_) / to_seconds(dt);
        avg_rate_bps8_ = avg_rate_bps8_ == 0.0 ? sample : avg_rate_bps8_ * 0.875 + sample * 0.125;
      }
      if (queue_bytes_after < kThresholdBytes) {
        in_cycle_ = false;
      } else {
        cycle_start_ = now;
        cycle_bytes_ = 0;
      }
    }
  }

  Duration estimate(std::uint64_t queue_bytes) const {
    if (avg_rate_bps8_ <= 0.0) return Duration{0};
    const double sec = static_cast<double>(queue_bytes) / avg_rate_bps8_;
    return duration_from_seconds(sec);
  }

  void reset() {
    in_cycle_ = false;
    avg_rate_bps8_ = 0.0;
  }

 private:
  bool in_cycle_ = false;
  SimTime cycle_start_{};
  std::uint64_t cycle_bytes_ = 0;
  double avg_rate_bps8_ = 0.0;  // bytes per second, smoothed
};

}  // namespace aqmsim::aqm
