#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "aqmsim/time.hpp"

namespace aqmsim {

/// Piggybacked acknowledgment state. `sacked_seq` is the data sequence
/// number that triggered this ACK; together with per-packet ACKs and a
/// lossless reverse path this gives the sender exact receiver state.
struct AckInfo {
  std::uint64_t cum_ack = 0;     // next sequence the receiver still needs
  std::uint64_t sacked_seq = 0;  // sequence acknowledged by this ACK
  SimTime echo_ts{};             // send timestamp of the acked data packet
  bool echo_valid = false;       // false for retransmissions (Karn)
  std::uint32_t incarnation = 0;
};

/// Unit of simulated traffic.
struct Packet {
  std::uint32_t flow = 0;
  std::uint32_t cls = 0;  // traffic-class index for metrics
  std::uint32_t incarnation = 0;
  std::uint32_t wire_bytes = 0;     // size on the link, headers included
  std::uint32_t payload_bytes = 0;  // goodput-relevant bytes
  std::uint64_t seq = 0;
  bool retransmit = false;
  SimTime origin_ts{};   // leaving the sender (one-way delay)
  SimTime enqueue_ts{};  // admission into the bottleneck queue (sojourn)
  std::optional<AckInfo> ack{};
};

/// FIFO backlog with byte accounting, shared by the queue disciplines.
class PacketFifo {
 public:
  void push(Packet&& p) {
    bytes_ += p.wire_bytes;
    q_.push_back(std::move(p));
  }
  Packet pop() {
    Packet p = std::move(q_.front());
    q_.pop_front();
    bytes_ -= p.wire_bytes;
    return p;
  }
  const Packet& front() const { return q_.front(); }
  bool empty() const { return q_.empty(); }
  std::size_t size() const { return q_.size(); }
  std::uint64_t bytes() const { return bytes_; }

 private:
  std::deque<Packet> q_;
  std::uint64_t bytes_ = 0;
};

}  // namespace aqmsim
