#include "wormbench/engine.hpp"

#include <stdexcept>

namespace wormbench {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPacketArrival: return "packet-arrival";
    case EventKind::kTimerExpiry: return "timer-expiry";
    case EventKind::kFlowStart: return "flow-start";
    case EventKind::kProbeDue: return "probe-due";
    case EventKind::kRecoveryCheck: return "recovery-check";
  }
  return "unknown";
}

EventId Engine::schedule(SimTime time, EventKind kind, NodeId /*target*/, Handler handler) {
  if (time < clock_) {
    throw std::logic_error("Engine::schedule: event at " + time.to_string() +
                           " is before the clock " + clock_.to_string());
  }
  std::uint32_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  }
  const std::uint64_t seq = next_seq_++;
  Slot& s = slots_[slot];
  s.handler = std::move(handler);
  s.seq = seq;
  s.kind = kind;
  s.live = true;
  heap_.push(Entry{time, seq, slot});
  return EventId{slot, seq};
}

bool Engine::pending(EventId id) const {
  return id.valid() && id.slot < slots_.size() && slots_[id.slot].live &&
         slots_[id.slot].seq == id.seq;
}

bool Engine::cancel(EventId id) {
  if (!pending(id)) return false;
  Slot& s = slots_[id.slot];
  s.live = false;
  s.handler = nullptr;
  stats_.events_cancelled++;
  return true;
}

const EngineStats& Engine::run_until(SimTime t_end) {
  stop_requested_ = false;
  while (!heap_.empty() && heap_.top().time <= t_end) {
    const Entry e = heap_.top();
    heap_.pop();
    Slot& s = slots_[e.slot];
    if (s.seq != e.seq || !s.live) {
      // Cancelled; the slot is reclaimed once its heap entry is gone.
      if (s.seq == e.seq) free_slots_.push_back(e.slot);
      continue;
    }
    clock_ = e.time;
    Handler h = std::move(s.handler);
    const EventKind kind = s.kind;
    s.live = false;
    s.handler = nullptr;
    free_slots_.push_back(e.slot);
    stats_.events_processed++;
    stats_.by_kind[static_cast<std::size_t>(kind)]++;
    h();
    if (stop_requested_) {
      stats_.final_clock = clock_;
      return stats_;
    }
  }
  if (t_end > clock_) clock_ = t_end;
  stats_.final_clock = clock_;
  return stats_;
}

}  // namespace wormbench
