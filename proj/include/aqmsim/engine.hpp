#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aqmsim/error.hpp"
#include "aqmsim/rng.hpp"
#include "aqmsim/time.hpp"

namespace aqmsim {

struct SimSummary {
  std::uint64_t events_processed = 0;
  SimTime end{};
};

class Engine;

/// Ticket for a scheduled event; cancel() through the owning engine.
class EventHandle {
 public:
  EventHandle() = default;

 private:
  friend class Engine;
  explicit EventHandle(std::uint64_t seq) : seq_(seq) {}
  std::uint64_t seq_ = 0;  // 0 = null
};

/// Deterministic discrete-event core: integer-ns clock, (fire_at, seq)
/// ordered delivery, stable FIFO tie-break at equal timestamps.
/// Single-threaded; a whole Engine (and everything it drives) is confined
/// to one simulation instance.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : rng_(seed) {}

  SimTime now() const { return clock_; }
  Rng& rng() { return rng_; }

  EventHandle schedule_at(SimTime fire_at, std::function<void()> action) {
    if (fire_at < clock_) {
      throw SchedulingInPast("schedule at t=" + std::to_string(fire_at.ns()) +
                             "ns behind clock t=" + std::to_string(clock_.ns()) + "ns");
    }
    const std::uint64_t seq = ++next_seq_;
    actions_.emplace(seq, std::move(action));
    heap_.push(Entry{fire_at.ns(), seq});
    return EventHandle(seq);
  }

  EventHandle schedule_after(Duration delay, std::function<void()> action) {
    return schedule_at(clock_ + delay, std::move(action));
  }

  /// True iff the event existed, had not fired, and will now never fire.
  bool cancel(EventHandle h) {
    if (h.seq_ == 0) return false;
    return actions_.erase(h.seq_) > 0;
  }

  /// Processes every event with fire_at <= end in (fire_at, seq) order,
  /// then leaves the clock at exactly `end`.
  SimSummary run_until(SimTime end) {
    while (!heap_.empty()) {
      const Entry top = heap_.top();
      if (top.at_ns > end.ns()) break;
      heap_.pop();
      auto it = actions_.find(top.seq);
      if (it == actions_.end()) continue;  // cancelled
      std::function<void()> action = std::move(it->second);
      actions_.erase(it);
      clock_ = SimTime::from_ns(top.at_ns);
      action();
      ++processed_;
    }
    clock_ = end;
    return SimSummary{processed_, clock_};
  }

  std::size_t pending() const { return actions_.size(); }

 private:
  struct Entry {
    std::int64_t at_ns;
    std::uint64_t seq;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at_ns != b.at_ns) return a.at_ns > b.at_ns;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::unordered_map<std::uint64_t, std::function<void()>> actions_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  SimTime clock_{};
  Rng rng_;
};

}  // namespace aqmsim
