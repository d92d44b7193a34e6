#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "aqmsim/time.hpp"

namespace aqmsim::transport {

struct TcpConfig {
  std::uint32_t initial_window = 10;  // packets
  std::uint32_t mss_bytes = 1460;     // payload of a full segment
  std::uint32_t header_bytes = 40;    // TCP/IP overhead on the wire
  std::uint32_t ack_bytes = 40;
  double cubic_c = 0.4;
  double cubic_beta = 0.7;  // multiplicative decrease factor
  Duration min_rto = std::chrono::milliseconds(200);
  Duration initial_rto = std::chrono::seconds(1);
  std::uint32_t dupack_threshold = 3;
  // Delay-based slow-start exit, as in the Linux CUBIC module: leave slow
  // start once the round's RTT floor rises clamp(base/8, 4..16 ms) above
  // the path's RTT floor.
  bool hystart = true;
  std::uint32_t hystart_min_samples = 8;
};

/// Time from window reduction back to the w_max plateau.
inline double cubic_k(double w_max, const TcpConfig& cfg) {
  return std::cbrt(w_max * (1.0 - cfg.cubic_beta) / cfg.cubic_c);
}

/// W(t) = C*(t - K)^3 + w_max, t in seconds since the epoch started.
/// W(0) = beta*w_max and W(K) = w_max.
inline double cubic_window(double t_since_epoch, double w_max, const TcpConfig& cfg) {
  const double d = t_since_epoch - cubic_k(w_max, cfg);
  return cfg.cubic_c * d * d * d + w_max;
}

/// TCP-friendly floor (reno-equivalent average rate).
inline double cubic_w_est(double t_since_epoch, double rtt_sec, double w_max,
                          const TcpConfig& cfg) {
  const double b = cfg.cubic_beta;
  return w_max * b + (3.0 * (1.0 - b) / (1.0 + b)) * (t_since_epoch / rtt_sec);
}

}  // namespace aqmsim::transport
