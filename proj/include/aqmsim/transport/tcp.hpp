#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <map>
#include <set>
#include <utility>

#include "aqmsim/engine.hpp"
#include "aqmsim/packet.hpp"
#include "aqmsim/transport/cubic.hpp"

namespace aqmsim::transport {

using PacketOut = std::function<void(Packet&&)>;

/// Congestion/RTT state of one sender, in packet units.
struct TcpFlowState {
  double cwnd = 1.0;  // fractional packets
  double ssthresh = std::numeric_limits<double>::max();
  double w_max = 0.0;
  std::optional<SimTime> epoch_start{};
  Duration srtt{0};
  Duration rttvar{0};
  std::uint64_t highest_acked = 0;   // cumulative: packets contiguously acked
  std::uint64_t highest_sacked = 0;  // exclusive bound of the highest seq received
  bool in_recovery = false;
};

/// Simplified CUBIC sender. Sequence space is whole packets; SACK state is
/// exact (per-packet ACKs over a lossless reverse path). Loss inference runs
/// in transmission order: a transmission is deemed lost once
/// dupack_threshold later transmissions have been acknowledged, which on a
/// FIFO path is exact and also catches lost retransmissions without waiting
/// for the timer. One window reduction per loss event; timeouts fall back to
/// cwnd = 1 with exponential backoff. No handshake is simulated; the caller
/// charges connection setup by delaying `start`.
class TcpSender {
 public:
  TcpSender(Engine& eng, const TcpConfig& cfg, std::uint32_t flow, std::uint32_t cls,
            PacketOut out)
      : eng_(eng), cfg_(cfg), flow_(flow), cls_(cls), out_(std::move(out)) {}

  /// Begin a transfer of `total_bytes` (0 = unbounded bulk) at `start`.
  /// Returns the incarnation stamping this transfer's packets.
  std::uint32_t open(std::uint64_t total_bytes, SimTime start) {
    cancel_rto();
    ++incarnation_;
    st_ = TcpFlowState{};
    st_.cwnd = cfg_.initial_window;
    next_seq_ = 0;
    inflight_by_tx_.clear();
    tx_of_seq_.clear();
    lost_.clear();
    tx_counter_ = 0;
    highest_obs_tx_ = 0;
    rto_base_ = cfg_.initial_rto;
    backoff_ = 1;
    min_path_rtt_ = Duration::max();
    hs_round_end_ = 0;
    hs_round_min_ = Duration::max();
    hs_samples_ = 0;
    if (total_bytes == 0) {
      total_pkts_ = std::numeric_limits<std::uint64_t>::max();
      last_payload_ = cfg_.mss_bytes;
    } else {
      total_pkts_ = (total_bytes + cfg_.mss_bytes - 1) / cfg_.mss_bytes;
      const std::uint64_t rem = total_bytes % cfg_.mss_bytes;
      last_payload_ = rem == 0 ? cfg_.mss_bytes : static_cast<std::uint32_t>(rem);
    }
    const std::uint32_t inc = incarnation_;
    eng_.schedule_at(start, [this, inc] {
      if (inc == incarnation_) try_send();
    });
    return inc;
  }

  void on_ack(const AckInfo& ack) {
    if (ack.incarnation != incarnation_) return;
    const SimTime now = eng_.now();

    if (ack.echo_valid) {
      update_rtt(now - ack.echo_ts);
      hystart_sample(now - ack.echo_ts, ack.cum_ack);
    }

    bool progress = acknowledge(ack.sacked_seq);
    const std::uint64_t prev_cum = st_.highest_acked;
    if (ack.cum_ack > st_.highest_acked) {
      st_.highest_acked = ack.cum_ack;
      backoff_ = 1;
      prune_below(st_.highest_acked);
      progress = true;
    }
    st_.highest_sacked = std::max({st_.highest_sacked, ack.sacked_seq + 1, ack.cum_ack});

    const bool newly_lost = mark_losses();
    if (newly_lost && !st_.in_recovery) {
      ++recoveries_;
      st_.in_recovery = true;
      recovery_end_ = next_seq_;
      st_.w_max = st_.cwnd;
      st_.cwnd = std::max(st_.cwnd * cfg_.cubic_beta, 1.0);
      st_.ssthresh = std::max(st_.cwnd, 2.0);
      st_.epoch_start.reset();  // set again when growth resumes
    }
    if (st_.in_recovery && st_.highest_acked >= recovery_end_) {
      st_.in_recovery = false;
      st_.epoch_start.reset();  // congestion avoidance restarts here
    }

    const std::uint64_t newly_acked = st_.highest_acked - prev_cum;
    if (newly_acked > 0 && !st_.in_recovery) grow(newly_acked, now);

    if (done() || (inflight_by_tx_.empty() && lost_.empty() && next_seq_ >= total_pkts_)) {
      cancel_rto();
    } else if (progress) {
      restart_rto();
    }
    try_send();
  }

  const TcpFlowState& state() const { return st_; }
  std::uint32_t incarnation() const { return incarnation_; }
  Duration current_rto() const { return effective_rto(); }
  std::uint64_t packets_sent() const { return sent_; }
  std::uint64_t retransmits() const { return retx_; }
  std::uint64_t timeouts() const { return rto_fired_; }
  std::uint64_t recoveries() const { return recoveries_; }
  bool done() const { return st_.highest_acked >= total_pkts_; }

 private:
  /// Ends slow start on either classic signal: the round's RTT floor rose
  /// (queue already building), or the round's ACK train spans half the
  /// path RTT (the pipe is full before the queue builds).
  void hystart_sample(Duration rtt, std::uint64_t cum_ack) {
    if (!cfg_.hystart || st_.cwnd >= st_.ssthresh) return;
    min_path_rtt_ = std::min(min_path_rtt_, rtt);
    const SimTime now = eng_.now();
    if (cum_ack > hs_round_end_) {
      hs_round_end_ = next_seq_;
      hs_round_min_ = Duration::max();
      hs_samples_ = 0;
      hs_round_first_ack_ = now;
    }
    hs_round_min_ = std::min(hs_round_min_, rtt);
    ++hs_samples_;
    if (st_.cwnd < 16.0 || hs_samples_ < cfg_.hystart_min_samples) return;
    const Duration threshold =
        std::clamp(min_path_rtt_ / 8, Duration(std::chrono::milliseconds(4)),
                   Duration(std::chrono::milliseconds(16)));
    const bool delay_rose = hs_round_min_ >= min_path_rtt_ + threshold;
    const bool train_full = now - hs_round_first_ack_ >= min_path_rtt_ / 2;
    if (delay_rose || train_full) {
      st_.ssthresh = st_.cwnd;  // congestion avoidance from here
    }
  }

  void update_rtt(Duration sample) {
    if (st_.srtt == Duration{0}) {
      st_.srtt = sample;
      st_.rttvar = sample / 2;
    } else {
      const Duration err = sample > st_.srtt ? sample - st_.srtt : st_.srtt - sample;
      st_.rttvar = (st_.rttvar * 3 + err) / 4;
      st_.srtt = (st_.srtt * 7 + sample) / 8;
    }
    rto_base_ = st_.srtt + st_.rttvar * 4;
  }

  /// Retires the acknowledged transmission; true if it was still in flight.
  bool acknowledge(std::uint64_t seq) {
    auto it = tx_of_seq_.find(seq);
    if (it == tx_of_seq_.end()) {
      lost_.erase(seq);
      return false;
    }
    highest_obs_tx_ = std::max(highest_obs_tx_, it->second);
    inflight_by_tx_.erase(it->second);
    tx_of_seq_.erase(it);
    lost_.erase(seq);
    return true;
  }

  void prune_below(std::uint64_t cum) {
    for (auto it = tx_of_seq_.begin(); it != tx_of_seq_.end() && it->first < cum;) {
      highest_obs_tx_ = std::max(highest_obs_tx_, it->second);
      inflight_by_tx_.erase(it->second);
      it = tx_of_seq_.erase(it);
    }
    lost_.erase(lost_.begin(), lost_.lower_bound(cum));
  }

  /// A transmission is lost once dupack_threshold transmissions sent after
  /// it have been acknowledged. FIFO links make this exact, including for
  /// retransmissions.
  bool mark_losses() {
    bool any = false;
    while (!inflight_by_tx_.empty() &&
           inflight_by_tx_.begin()->first + cfg_.dupack_threshold <= highest_obs_tx_) {
      const std::uint64_t seq = inflight_by_tx_.begin()->second;
      inflight_by_tx_.erase(inflight_by_tx_.begin());
      tx_of_seq_.erase(seq);
      lost_.insert(seq);
      any = true;
    }
    return any;
  }

  void grow(std::uint64_t newly_acked, SimTime now) {
    if (st_.cwnd < st_.ssthresh) {
      st_.cwnd += static_cast<double>(newly_acked);
      return;
    }
    if (!st_.epoch_start) {
      st_.epoch_start = now;
      st_.w_max = std::max(st_.w_max, st_.cwnd);
    }
    const double t = to_seconds(now - *st_.epoch_start);
    const double rtt = st_.srtt > Duration{0} ? to_seconds(st_.srtt) : 0.1;
    if (cubic_window(t, st_.w_max, cfg_) < cubic_w_est(t, rtt, st_.w_max, cfg_)) {
      st_.cwnd = std::max(st_.cwnd, cubic_w_est(t, rtt, st_.w_max, cfg_));
    } else {
      const double target = std::min(cubic_window(t + rtt, st_.w_max, cfg_), 1.5 * st_.cwnd);
      if (target > st_.cwnd) {
        st_.cwnd += static_cast<double>(newly_acked) * (target - st_.cwnd) / st_.cwnd;
      }
    }
  }

  void try_send() {
    const auto wnd = static_cast<std::uint64_t>(std::max(1.0, std::floor(st_.cwnd)));
    while (inflight_by_tx_.size() < wnd) {
      if (!lost_.empty()) {
        const std::uint64_t s = *lost_.begin();
        lost_.erase(lost_.begin());
        send_seq(s, true);
      } else if (next_seq_ < total_pkts_) {
        send_seq(next_seq_++, false);
      } else {
        break;
      }
    }
    if ((!inflight_by_tx_.empty() || !lost_.empty()) && !rto_handle_) schedule_rto();
  }

  void send_seq(std::uint64_t seq, bool retx) {
    Packet p;
    p.flow = flow_;
    p.cls = cls_;
    p.incarnation = incarnation_;
    p.seq = seq;
    p.retransmit = retx;
    p.payload_bytes = seq + 1 == total_pkts_ ? last_payload_ : cfg_.mss_bytes;
    p.wire_bytes = p.payload_bytes + cfg_.header_bytes;
    p.origin_ts = eng_.now();
    const std::uint64_t order = ++tx_counter_;
    auto old = tx_of_seq_.find(seq);
    if (old != tx_of_seq_.end()) inflight_by_tx_.erase(old->second);
    tx_of_seq_[seq] = order;
    inflight_by_tx_[order] = seq;
    if (retx) ++retx_;
    ++sent_;
    out_(std::move(p));
  }

  Duration effective_rto() const {
    const Duration base = std::max(rto_base_, cfg_.min_rto);
    const Duration capped = std::min(base * backoff_, Duration(std::chrono::seconds(60)));
    return capped;
  }

  void schedule_rto() {
    rto_handle_ = eng_.schedule_after(effective_rto(), [this] { handle_rto(); });
  }

  void restart_rto() {
    cancel_rto();
    schedule_rto();
  }

  void cancel_rto() {
    if (rto_handle_) {
      eng_.cancel(*rto_handle_);
      rto_handle_.reset();
    }
  }

  void handle_rto() {
    rto_handle_.reset();
    ++rto_fired_;
    st_.ssthresh = std::max(st_.cwnd / 2.0, 2.0);
    st_.w_max = st_.cwnd;
    st_.cwnd = 1.0;
    st_.epoch_start.reset();
    st_.in_recovery = false;
    // Everything unacknowledged is presumed gone.
    for (const auto& [order, seq] : inflight_by_tx_) lost_.insert(seq);
    inflight_by_tx_.clear();
    tx_of_seq_.clear();
    hs_round_end_ = next_seq_;
    hs_round_min_ = Duration::max();
    hs_samples_ = 0;
    backoff_ = std::min<std::uint32_t>(backoff_ * 2, 64);
    try_send();
    if (!rto_handle_) schedule_rto();
  }

  Engine& eng_;
  TcpConfig cfg_;
  std::uint32_t flow_;
  std::uint32_t cls_;
  PacketOut out_;

  TcpFlowState st_{};
  std::uint32_t incarnation_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t total_pkts_ = 0;
  std::uint32_t last_payload_ = 0;
  std::map<std::uint64_t, std::uint64_t> inflight_by_tx_;  // tx order -> seq
  std::map<std::uint64_t, std::uint64_t> tx_of_seq_;       // seq -> latest tx order
  std::set<std::uint64_t> lost_;                           // awaiting retransmission
  std::uint64_t tx_counter_ = 0;
  std::uint64_t highest_obs_tx_ = 0;  // highest acknowledged tx order
  std::uint64_t recovery_end_ = 0;

  Duration rto_base_{};
  std::uint32_t backoff_ = 1;
  Duration min_path_rtt_ = Duration::max();
  std::uint64_t hs_round_end_ = 0;
  Duration hs_round_min_ = Duration::max();
  std::uint32_t hs_samples_ = 0;
  SimTime hs_round_first_ack_{};
  std::optional<EventHandle> rto_handle_{};
  std::uint64_t sent_ = 0;
  std::uint64_t retx_ = 0;
  std::uint64_t rto_fired_ = 0;
  std::uint64_t recoveries_ = 0;
};

/// Receiving endpoint: per-packet ACKs carrying (cum_ack, this seq, echo).
/// The delivery tap sees every arriving data packet and whether it is the
/// first copy of its sequence (for unique-goodput accounting).
class TcpReceiver {
 public:
  using DeliveryTap = std::function<void(const Packet&, bool first_copy)>;

  TcpReceiver(Engine& eng, const TcpConfig& cfg, std::uint32_t flow, PacketOut ack_out)
      : eng_(eng), cfg_(cfg), flow_(flow), ack_out_(std::move(ack_out)) {}

  void set_delivery_tap(DeliveryTap tap) { tap_ = std::move(tap); }

  /// Arm for one transfer; on_complete fires when the last byte arrives.
  void open(std::uint64_t total_pkts, std::uint32_t incarnation,
            std::function<void(SimTime)> on_complete = {}) {
    cum_ = 0;
    ooo_.clear();
    total_pkts_ = total_pkts;
    incarnation_ = incarnation;
    on_complete_ = std::move(on_complete);
    completed_ = false;
  }

  void on_data(Packet&& p) {
    if (p.incarnation != incarnation_) return;  // stale packet of an old transfer
    const SimTime now = eng_.now();
    bool first = false;
    if (p.seq >= cum_ && ooo_.insert(p.seq).second) {
      first = true;
      for (auto it = ooo_.begin(); it != ooo_.end() && *it == cum_;) {
        ++cum_;
        it = ooo_.erase(it);
      }
    }
    if (tap_) tap_(p, first);

    Packet ack;
    ack.flow = flow_;
    ack.cls = p.cls;
    ack.incarnation = incarnation_;
    ack.wire_bytes = cfg_.ack_bytes;
    ack.origin_ts = now;
    ack.ack = AckInfo{cum_, p.seq, p.origin_ts, !p.retransmit, incarnation_};
    ack_out_(std::move(ack));

    if (!completed_ && total_pkts_ > 0 && cum_ >= total_pkts_) {
      completed_ = true;
      if (on_complete_) on_complete_(now);
    }
  }

  std::uint64_t cum_ack() const { return cum_; }

 private:
  Engine& eng_;
  TcpConfig cfg_;
  std::uint32_t flow_;
  PacketOut ack_out_;
  DeliveryTap tap_;
  std::uint64_t cum_ = 0;
  std::set<std::uint64_t> ooo_;
  std::uint64_t total_pkts_ = 0;
  std::uint32_t incarnation_ = 0;
  bool completed_ = false;
  std::function<void(SimTime)> on_complete_;
};

}  // namespace aqmsim::transport
