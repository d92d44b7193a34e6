#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "aqmsim/aqm/drop.hpp"
#include "aqmsim/metrics/stats.hpp"
#include "aqmsim/time.hpp"

namespace aqmsim::metrics {

struct QdelaySample {
  SimTime at{};       // dequeue instant
  Duration delay{0};  // dequeue - enqueue
  std::uint32_t cls = 0;
};

struct OwdSample {
  SimTime at{};
  Duration delay{0};
};

struct DownloadRecord {
  std::uint32_t flow = 0;
  std::uint64_t size_bytes = 0;
  Duration duration{0};
  bool completed = false;  // false: truncated at run end
};

/// Conservation ledger of the bottleneck queue.
struct QueueCounters {
  std::uint64_t offered = 0;    // enqueue attempts
  std::uint64_t delivered = 0;  // put on the wire
  std::uint64_t dropped = 0;    // all causes, enqueue- and dequeue-side
  std::uint64_t resident = 0;   // still queued at run end
};

/// Sender-side TCP totals across all flows of a run.
struct TransportCounters {
  std::uint64_t packets_sent = 0;
  std::uint64_t retransmits = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t recoveries = 0;
};

/// Everything one simulation run measures. Queuing delay and one-way delay
/// are per-packet; utilization and goodput are per-second buckets.
struct MetricSeries {
  std::vector<std::string> class_names;
  std::vector<QdelaySample> qdelay;
  std::vector<double> util;                             // [second]
  std::vector<std::vector<std::uint64_t>> goodput_bits;  // [class][second]
  std::vector<aqm::DropRecord> drops;
  std::vector<std::uint64_t> update_tick_ords;  // AQM tick positions in event order
  std::vector<OwdSample> owd;
  std::vector<DownloadRecord> downloads;
  QueueCounters queue{};
  TransportCounters tcp{};
  std::uint64_t events_processed = 0;
  std::uint64_t seed = 0;
};

/// In-run tap points. Confined to its simulation instance; the run loop
/// is single-threaded so plain counters suffice.
class Collector {
 public:
  Collector(std::uint64_t bottleneck_rate_bps, Duration run_duration,
            std::vector<std::string> class_names)
      : rate_bps_(bottleneck_rate_bps),
        seconds_(static_cast<std::size_t>((run_duration.count() + 999'999'999) / 1'000'000'000)) {
    series_.class_names = std::move(class_names);
    series_.goodput_bits.assign(series_.class_names.size(),
                                std::vector<std::uint64_t>(seconds_, 0));
    busy_ns_.assign(seconds_, 0);
  }

  std::uint64_t next_ord() { return ++ord_; }

  void on_offered() { ++series_.queue.offered; }

  void record_qdelay(SimTime at, Duration delay, std::uint32_t cls) {
    series_.qdelay.push_back({at, delay, cls});
  }

  void record_drop(aqm::DropRecord rec) {
    ++series_.queue.dropped;
    rec.ord = next_ord();
    series_.drops.push_back(rec);
  }

  void record_update_tick() { series_.update_tick_ords.push_back(next_ord()); }

  /// Serialization interval [from, to) on the bottleneck wire.
  void add_busy_interval(SimTime from, SimTime to) {
    ++series_.queue.delivered;
    std::int64_t a = from.ns();
    const std::int64_t b = to.ns();
    while (a < b) {
      const std::size_t sec = static_cast<std::size_t>(a / 1'000'000'000);
      if (sec >= seconds_) break;
      const std::int64_t sec_end = static_cast<std::int64_t>(sec + 1) * 1'000'000'000;
      busy_ns_[sec] += static_cast<std::uint64_t>(std::min(b, sec_end) - a);
      a = std::min(b, sec_end);
    }
  }

  void on_delivered_payload(std::uint32_t cls, std::uint32_t payload_bytes, SimTime now) {
    auto sec = static_cast<std::size_t>(now.ns() / 1'000'000'000);
    if (sec >= seconds_) sec = seconds_ - 1;
    series_.goodput_bits[cls][sec] += static_cast<std::uint64_t>(payload_bytes) * 8;
  }

  void record_owd(SimTime at, Duration owd) { series_.owd.push_back({at, owd}); }

  void record_download(DownloadRecord rec) { series_.downloads.push_back(rec); }

  void set_queue_residual(std::uint64_t packets) { series_.queue.resident = packets; }

  void set_transport_counters(TransportCounters t) { series_.tcp = t; }

  std::uint64_t rate_bps() const { return rate_bps_; }

  MetricSeries finalize(std::uint64_t events_processed, std::uint64_t seed) {
    series_.util.resize(seconds_);
    for (std::size_t s = 0; s < seconds_; ++s) {
      // Bits' worth of wire time spent serving in this second, over capacity.
      const double bits = static_cast<double>(busy_ns_[s]) * 1e-9 * static_cast<double>(rate_bps_);
      series_.util[s] = utilization_sample(bits, static_cast<double>(rate_bps_));
    }
    series_.events_processed = events_processed;
    series_.seed = seed;
    return std::move(series_);
  }

 private:
  std::uint64_t rate_bps_;
  std::size_t seconds_;
  std::uint64_t ord_ = 0;
  std::vector<std::uint64_t> busy_ns_;
  MetricSeries series_;
};

}  // namespace aqmsim::metrics
