#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <utility>

#include "aqmsim/aqm/codel.hpp"
#include "aqmsim/aqm/droptail.hpp"
#include "aqmsim/aqm/madpie.hpp"
#include "aqmsim/aqm/pie.hpp"
#include "aqmsim/engine.hpp"
#include "aqmsim/metrics/collector.hpp"
#include "aqmsim/netsim/scenario.hpp"
#include "aqmsim/packet.hpp"

namespace aqmsim::netsim {

/// The managed buffer plus the outgoing wire of the constrained link.
/// Enqueue decisions run at arrival (DropTail/PIE/MADPIE), CoDel acts at
/// each transmit opportunity, PIE/MADPIE tick on a self-rescheduling
/// update event. Delivery hands the packet over with its arrival instant
/// at the far router so the caller can chain the egress hop without an
/// extra event.
class BottleneckQueue {
 public:
  using DeliverFn = std::function<void(Packet&&, SimTime far_arrival)>;

  BottleneckQueue(Engine& eng, const AqmConfig& aqm, std::uint64_t capacity_bytes,
                  std::uint64_t rate_bps, Duration owd, metrics::Collector& col)
      : eng_(eng),
        cfg_(aqm),
        capacity_(capacity_bytes),
        rate_bps_(rate_bps),
        owd_(owd),
        col_(col),
        pie_(aqm::make_pie_state(aqm.pie)),
        madpie_(aqm::make_madpie_state(aqm.madpie())) {
    if (cfg_.kind == AqmKind::Pie || cfg_.kind == AqmKind::Madpie) {
      eng_.schedule_after(cfg_.pie.update_interval, [this] { on_update_tick(); });
    }
  }

  void set_sink(DeliverFn sink) { sink_ = std::move(sink); }

  void enqueue(Packet&& p) {
    col_.on_offered();
    const SimTime now = eng_.now();
    aqm::EnqueueDecision dec;
    switch (cfg_.kind) {
      case AqmKind::DropTail:
      case AqmKind::Codel:
        dec = aqm::droptail_enqueue_decision(fifo_.bytes(), p.wire_bytes, capacity_);
        break;
      case AqmKind::Pie:
        dec = aqm::pie_enqueue_decision(pie_, p.wire_bytes, capacity_,
                                        eng_.rng().uniform01());
        break;
      case AqmKind::Madpie:
        dec = aqm::madpie_enqueue_decision(madpie_, p.wire_bytes, capacity_,
                                           eng_.rng().uniform01());
        break;
    }
    if (!dec.accepted()) {
      col_.record_drop({now, *dec.drop, backlog_delay(), p.flow});
      return;
    }
    p.enqueue_ts = now;
    fifo_.push(std::move(p));
    try_transmit();
  }

  std::uint64_t backlog_bytes() const { return fifo_.bytes(); }
  std::size_t backlog_packets() const { return fifo_.size(); }
  std::uint64_t capacity_bytes() const { return capacity_; }

  const aqm::PieState& pie_state() const {
    return cfg_.kind == AqmKind::Madpie ? madpie_.pie : pie_;
  }
  const aqm::MadpieState& madpie_state() const { return madpie_; }
  const aqm::CodelState& codel_state() const { return codel_; }

 private:
  /// What a packet arriving now would wait: backlog over drain rate.
  Duration backlog_delay() const { return aqm::pie_estimate_delay(fifo_.bytes(), rate_bps_); }

  void on_update_tick() {
    const Duration est = cfg_.pie.estimator == aqm::DelayEstimator::Backlog
                             ? aqm::pie_estimate_delay(fifo_.bytes(), rate_bps_)
                             : dq_est_.estimate(fifo_.bytes());
    if (cfg_.kind == AqmKind::Pie) {
      pie_.est_delay = est;
      aqm::pie_update(pie_, cfg_.pie);
      assert(pie_.queue_bytes == fifo_.bytes());
    } else {
      madpie_.pie.est_delay = est;
      aqm::madpie_update(madpie_, cfg_.madpie());
      assert(madpie_.pie.queue_bytes == fifo_.bytes());
    }
    col_.record_update_tick();
    eng_.schedule_after(cfg_.pie.update_interval, [this] { on_update_tick(); });
  }

  void try_transmit() {
    if (busy_ || fifo_.empty()) return;
    const SimTime now = eng_.now();
    Packet p;
    if (cfg_.kind == AqmKind::Codel) {
      auto popped = aqm::codel_dequeue(codel_, cfg_.codel, fifo_, now,
                                       [&](const Packet& dp, Duration sojourn) {
                                         col_.record_drop({now, aqm::DropCause::CodelDrop,
                                                           sojourn, dp.flow});
                                       });
      if (!popped) return;
      p = std::move(*popped);
    } else {
      p = fifo_.pop();
      if (cfg_.kind == AqmKind::Pie) aqm::pie_on_dequeue(pie_, p.wire_bytes);
      if (cfg_.kind == AqmKind::Madpie) aqm::madpie_on_dequeue(madpie_, p.wire_bytes);
    }
    if (cfg_.pie.estimator == aqm::DelayEstimator::DepartureRate) {
      dq_est_.on_dequeue(fifo_.bytes(), p.wire_bytes, now);
    }
    col_.record_qdelay(now, now - p.enqueue_ts, p.cls);
    const SimTime done = now + transmission_time(p.wire_bytes, rate_bps_);
    col_.add_busy_interval(now, done);
    busy_ = true;
    eng_.schedule_at(done, [this, pkt = std::move(p)]() mutable {
      busy_ = false;
      sink_(std::move(pkt), eng_.now() + owd_);
      try_transmit();
    });
  }

  Engine& eng_;
  AqmConfig cfg_;
  std::uint64_t capacity_;
  std::uint64_t rate_bps_;
  Duration owd_;
  metrics::Collector& col_;
  DeliverFn sink_;

  PacketFifo fifo_;
  bool busy_ = false;
  aqm::PieState pie_;
  aqm::MadpieState madpie_;
  aqm::CodelState codel_;
  aqm::DepartureRateEstimator dq_est_;
};

}  // namespace aqmsim::netsim
