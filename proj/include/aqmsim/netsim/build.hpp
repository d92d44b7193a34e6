#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "aqmsim/engine.hpp"
#include "aqmsim/metrics/collector.hpp"
#include "aqmsim/netsim/bottleneck.hpp"
#include "aqmsim/netsim/link.hpp"
#include "aqmsim/netsim/scenario.hpp"
#include "aqmsim/transport/cbr.hpp"
#include "aqmsim/transport/shortflow.hpp"
#include "aqmsim/transport/tcp.hpp"

namespace aqmsim::netsim {

enum class FlowKind { Cbr, ShortFlow, Ftp };

/// One wired dumbbell instance:
///
///   senders --access--> R1 ==bottleneck(AQM)==> R2 --access--> receivers
///            <--access-- R1 <===reverse 10M===== R2 <--access--
///
/// Each sender group (near/far) owns its pair of access links in each
/// direction; flows are instantiated per ScenarioConfig counts and start
/// uniformly inside the first second. Entirely single-threaded; one
/// instance per engine, movable to any one worker thread.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg)
      : cfg_(std::move(cfg)), eng_(cfg_.seed), col_(make_collector()) {
    cfg_.validate();
    build();
  }

  metrics::MetricSeries run() {
    const SimTime end{cfg_.duration};
    const SimSummary summary = eng_.run_until(end);
    for (auto& app : sf_apps_) app->finalize(end);
    col_.set_queue_residual(queue_->backlog_packets());
    metrics::TransportCounters tcp;
    for (const auto& s : tcp_senders_) {
      tcp.packets_sent += s->packets_sent();
      tcp.retransmits += s->retransmits();
      tcp.timeouts += s->timeouts();
      tcp.recoveries += s->recoveries();
    }
    col_.set_transport_counters(tcp);
    return col_.finalize(summary.events_processed, cfg_.seed);
  }

  Engine& engine() { return eng_; }
  BottleneckQueue& bottleneck() { return *queue_; }
  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  Duration base_rtt(std::uint32_t group) const {
    return group == 0 ? cfg_.base_rtt_near() : cfg_.base_rtt_far();
  }

 private:
  struct GroupLinks {
    std::unique_ptr<Link> snd_access;      // hosts -> R1
    std::unique_ptr<Link> rcv_access;      // R2 -> hosts
    std::unique_ptr<Link> rev_rcv_access;  // hosts -> R2 (ACKs)
    std::unique_ptr<Link> rev_snd_access;  // R1 -> hosts (ACKs)
  };

  metrics::Collector make_collector() {
    class_names_.clear();
    cls_index_.clear();
    const bool mixed = cfg_.far.total() > 0;
    const int groups = mixed ? 2 : 1;
    for (int g = 0; g < groups; ++g) {
      const FlowCounts& fc = g == 0 ? cfg_.near : cfg_.far;
      const Duration rtt = g == 0 ? cfg_.base_rtt_near() : cfg_.base_rtt_far();
      const std::string suffix =
          mixed ? "_" + std::to_string(rtt.count() / 1'000'000) : std::string();
      auto add = [&](FlowKind k, int count, const char* base) {
        if (count <= 0) return;
        cls_index_[{g, k}] = static_cast<std::uint32_t>(class_names_.size());
        class_names_.push_back(base + suffix);
      };
      add(FlowKind::Cbr, fc.cbr, "cbr");
      add(FlowKind::ShortFlow, fc.sf, "sf");
      add(FlowKind::Ftp, fc.ftp, "ftp");
    }
    return metrics::Collector(cfg_.bottleneck_rate_bps, cfg_.duration, class_names_);
  }

  void build() {
    const bool mixed = cfg_.far.total() > 0;
    const int groups = mixed ? 2 : 1;

    queue_ = std::make_unique<BottleneckQueue>(eng_, cfg_.aqm,
                                               cfg_.effective_queue_capacity(),
                                               cfg_.bottleneck_rate_bps,
                                               cfg_.bottleneck_owd, col_);
    rev_bneck_ = std::make_unique<Link>(eng_, cfg_.bottleneck_rate_bps, cfg_.bottleneck_owd);

    for (int g = 0; g < groups; ++g) {
      const Duration snd_owd = g == 0 ? cfg_.access_owd : cfg_.far_access_owd;
      GroupLinks links;
      links.snd_access = std::make_unique<Link>(eng_, cfg_.access_rate_bps, snd_owd);
      links.rcv_access = std::make_unique<Link>(eng_, cfg_.access_rate_bps, cfg_.access_owd);
      links.rev_rcv_access =
          std::make_unique<Link>(eng_, cfg_.access_rate_bps, cfg_.access_owd);
      links.rev_snd_access = std::make_unique<Link>(eng_, cfg_.access_rate_bps, snd_owd);

      links.snd_access->set_sink([this](Packet&& p) { queue_->enqueue(std::move(p)); });
      links.rcv_access->set_sink([this](Packet&& p) { deliver_to_receiver(std::move(p)); });
      links.rev_rcv_access->set_sink([this](Packet&& p) { rev_bneck_->send(std::move(p)); });
      links.rev_snd_access->set_sink([this](Packet&& p) { deliver_to_sender(std::move(p)); });
      groups_.push_back(std::move(links));
    }

    queue_->set_sink([this](Packet&& p, SimTime far_arrival) {
      groups_[flow_group_[p.flow]].rcv_access->send_at(std::move(p), far_arrival);
    });
    rev_bneck_->set_sink([this](Packet&& p) {
      groups_[flow_group_[p.flow]].rev_snd_access->send(std::move(p));
    });

    for (int g = 0; g < groups; ++g) {
      const FlowCounts& fc = g == 0 ? cfg_.near : cfg_.far;
      for (int i = 0; i < fc.cbr; ++i) add_cbr_flow(g);
      for (int i = 0; i < fc.sf; ++i) add_tcp_flow(g, FlowKind::ShortFlow);
      for (int i = 0; i < fc.ftp; ++i) add_tcp_flow(g, FlowKind::Ftp);
    }
  }

  std::uint32_t new_flow(int group, FlowKind kind) {
    const auto flow = static_cast<std::uint32_t>(flow_group_.size());
    flow_group_.push_back(static_cast<std::uint32_t>(group));
    flow_kind_.push_back(kind);
    senders_.push_back(nullptr);
    receivers_.push_back(nullptr);
    return flow;
  }

  SimTime draw_start(Duration window) {
    return SimTime{} + eng_.rng().uniform_duration(Duration{0}, window);
  }

  void add_cbr_flow(int group) {
    const std::uint32_t flow = new_flow(group, FlowKind::Cbr);
    const std::uint32_t cls = cls_index_.at({group, FlowKind::Cbr});
    Link* out = groups_[group].snd_access.get();
    cbr_sources_.push_back(std::make_unique<transport::CbrSource>(
        eng_, cfg_.cbr, flow, cls, [out](Packet&& p) { out->send(std::move(p)); }));
    cbr_sources_.back()->start(draw_start(cfg_.cbr.start_window));
  }

  void add_tcp_flow(int group, FlowKind kind) {
    const std::uint32_t flow = new_flow(group, kind);
    const std::uint32_t cls = cls_index_.at({group, kind});
    Link* out = groups_[group].snd_access.get();
    Link* ack_out = groups_[group].rev_rcv_access.get();

    auto sender = std::make_unique<transport::TcpSender>(
        eng_, cfg_.tcp, flow, cls, [out](Packet&& p) { out->send(std::move(p)); });
    auto receiver = std::make_unique<transport::TcpReceiver>(
        eng_, cfg_.tcp, flow, [ack_out](Packet&& p) { ack_out->send(std::move(p)); });
    receiver->set_delivery_tap([this, cls](const Packet& p, bool first) {
      const SimTime now = eng_.now();
      col_.record_owd(now, now - p.origin_ts);
      if (first) col_.on_delivered_payload(cls, p.payload_bytes, now);
    });
    senders_[flow] = sender.get();
    receivers_[flow] = receiver.get();

    const Duration rtt = base_rtt(static_cast<std::uint32_t>(group));
    if (kind == FlowKind::Ftp) {
      // Bulk transfer: setup charged as one base RTT before the first data.
      const SimTime start = draw_start(cfg_.flow_start_window);
      const std::uint32_t inc = sender->open(0, start + rtt);
      receiver->open(0, inc);
    } else {
      sf_apps_.push_back(std::make_unique<transport::ShortFlowApp>(
          eng_, cfg_.shortflow, cfg_.tcp, *sender, *receiver, rtt, flow,
          [this](metrics::DownloadRecord rec) { col_.record_download(rec); }));
      sf_apps_.back()->start(draw_start(cfg_.shortflow.start_window));
    }
    tcp_senders_.push_back(std::move(sender));
    tcp_receivers_.push_back(std::move(receiver));
  }

  void deliver_to_receiver(Packet&& p) {
    if (flow_kind_[p.flow] == FlowKind::Cbr) {
      const SimTime now = eng_.now();
      col_.record_owd(now, now - p.origin_ts);
      col_.on_delivered_payload(p.cls, p.payload_bytes, now);
      return;
    }
    receivers_[p.flow]->on_data(std::move(p));
  }

  void deliver_to_sender(Packet&& p) {
    if (p.ack && senders_[p.flow] != nullptr) senders_[p.flow]->on_ack(*p.ack);
  }

  ScenarioConfig cfg_;
  Engine eng_;
  std::vector<std::string> class_names_;
  std::map<std::pair<int, FlowKind>, std::uint32_t> cls_index_;
  metrics::Collector col_;

  std::unique_ptr<BottleneckQueue> queue_;
  std::unique_ptr<Link> rev_bneck_;
  std::vector<GroupLinks> groups_;

  std::vector<std::uint32_t> flow_group_;
  std::vector<FlowKind> flow_kind_;
  std::vector<transport::TcpSender*> senders_;
  std::vector<transport::TcpReceiver*> receivers_;
  std::vector<std::unique_ptr<transport::TcpSender>> tcp_senders_;
  std::vector<std::unique_ptr<transport::TcpReceiver>> tcp_receivers_;
  std::vector<std::unique_ptr<transport::CbrSource>> cbr_sources_;
  std::vector<std::unique_ptr<transport::ShortFlowApp>> sf_apps_;
};

/// Wires a validated scenario into a runnable instance.
inline std::unique_ptr<Simulation> build_preset(const ScenarioConfig& cfg) {
  return std::make_unique<Simulation>(cfg);
}

}  // namespace aqmsim::netsim
