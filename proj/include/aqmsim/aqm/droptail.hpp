#pragma once

#include <cstdint>

#include "aqmsim/aqm/drop.hpp"

namespace aqmsim::aqm {

/// Plain FIFO: drop only when the packet does not fit.
inline EnqueueDecision droptail_enqueue_decision(std::uint64_t queue_bytes,
                                                 std::uint32_t pkt_bytes,
                                                 std::uint64_t capacity_bytes) {
  if (queue_bytes + pkt_bytes > capacity_bytes) {
    return EnqueueDecision::reject(DropCause::BufferOverflow);
  }
  return EnqueueDecision::accept();
}

}  // namespace aqmsim::aqm
