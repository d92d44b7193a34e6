#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "aqmsim/error.hpp"
#include "aqmsim/time.hpp"

namespace aqmsim::aqm {

enum class DropCause {
  RandomDrop,         // PIE/MADPIE random early drop
  DeterministicDrop,  // MADPIE only
  BufferOverflow,     // any discipline, buffer full
  CodelDrop,          // CoDel only
};

constexpr std::string_view to_string(DropCause c) {
  switch (c) {
    case DropCause::RandomDrop: return "RandomDrop";
    case DropCause::DeterministicDrop: return "DeterministicDrop";
    case DropCause::BufferOverflow: return "BufferOverflow";
    case DropCause::CodelDrop: return "CodelDrop";
  }
  return "?";
}

inline DropCause drop_cause_from_string(std::string_view s) {
  if (s == "RandomDrop") return DropCause::RandomDrop;
  if (s == "DeterministicDrop") return DropCause::DeterministicDrop;
  if (s == "BufferOverflow") return DropCause::BufferOverflow;
  if (s == "CodelDrop") return DropCause::CodelDrop;
  throw ConfigError("unknown drop cause: " + std::string(s));
}

/// One drop event; the basis of per-cause attribution.
struct DropRecord {
  SimTime at{};
  DropCause cause = DropCause::BufferOverflow;
  Duration queuing_delay_at_drop{0};
  std::uint32_t flow = 0;
  std::uint64_t ord = 0;  // in-run observation index, not exported
};

/// Outcome of an enqueue decision: admitted, or dropped with a cause.
struct EnqueueDecision {
  std::optional<DropCause> drop{};

  bool accepted() const { return !drop.has_value(); }
  static EnqueueDecision accept() { return {}; }
  static EnqueueDecision reject(DropCause c) { return {c}; }
};

}  // namespace aqmsim::aqm
