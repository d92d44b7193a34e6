#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "aqmsim/engine.hpp"
#include "aqmsim/metrics/collector.hpp"
#include "aqmsim/transport/tcp.hpp"

namespace aqmsim::transport {

/// Web-like on/off downloads: a random size from size_set, then a fresh
/// connection per transfer, then an exponential think time.
struct ShortFlowSpec {
  std::vector<std::uint64_t> size_set_bytes = {15'000, 44'000, 73'000, 102'000};
  Duration think_time_mean = std::chrono::milliseconds(9'500);
  Duration start_window = std::chrono::seconds(1);
};

/// Drives one sender/receiver pair through the download-think loop.
/// Download time runs from the request epoch (before the one-RTT setup
/// charge) to last-byte delivery at the receiver. A transfer still in
/// flight at run end is recorded as truncated.
class ShortFlowApp {
 public:
  ShortFlowApp(Engine& eng, const ShortFlowSpec& spec, const TcpConfig& tcp,
               TcpSender& sender, TcpReceiver& receiver, Duration setup_rtt,
               std::uint32_t flow, std::function<void(metrics::DownloadRecord)> on_record)
      : eng_(eng),
        spec_(spec),
        tcp_(tcp),
        sender_(sender),
        receiver_(receiver),
        setup_rtt_(setup_rtt),
        flow_(flow),
        on_record_(std::move(on_record)) {}

  void start(SimTime at) {
    eng_.schedule_at(at, [this] { begin_download(); });
  }

  /// Run-end flush of an unfinished transfer.
  void finalize(SimTime end) {
    if (in_flight_) {
      on_record_({flow_, size_bytes_, end - request_start_, false});
      in_flight_ = false;
    }
  }

  std::uint64_t downloads_completed() const { return completed_; }

 private:
  void begin_download() {
    request_start_ = eng_.now();
    size_bytes_ = spec_.size_set_bytes[eng_.rng().pick_index(spec_.size_set_bytes.size())];
    in_flight_ = true;
    const std::uint64_t pkts = (size_bytes_ + tcp_.mss_bytes - 1) / tcp_.mss_bytes;
    const std::uint32_t inc = sender_.open(size_bytes_, eng_.now() + setup_rtt_);
    receiver_.open(pkts, inc, [this](SimTime done_at) { on_complete(done_at); });
  }

  void on_complete(SimTime at) {
    in_flight_ = false;
    ++completed_;
    on_record_({flow_, size_bytes_, at - request_start_, true});
    const Duration think = eng_.rng().exponential(spec_.think_time_mean);
    eng_.schedule_at(at + think, [this] { begin_download(); });
  }

  Engine& eng_;
  ShortFlowSpec spec_;
  TcpConfig tcp_;
  TcpSender& sender_;
  TcpReceiver& receiver_;
  Duration setup_rtt_;
  std::uint32_t flow_;
  std::function<void(metrics::DownloadRecord)> on_record_;

  bool in_flight_ = false;
  SimTime request_start_{};
  std::uint64_t size_bytes_ = 0;
  std::uint64_t completed_ = 0;
};

}  // namespace aqmsim::transport
