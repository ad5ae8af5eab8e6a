#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "wormbench/rng.hpp"
#include "wormbench/sim_time.hpp"

namespace wormbench {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

enum class EventKind : std::uint8_t {
  kPacketArrival,
  kTimerExpiry,
  kFlowStart,
  kProbeDue,
  kRecoveryCheck,
};
inline constexpr std::size_t kEventKindCount = 5;

const char* to_string(EventKind kind);

// Handle for cancelling a scheduled event. A default-constructed id refers to nothing.
struct EventId {
  std::uint32_t slot = 0xffffffffu;
  std::uint64_t seq = 0;

  bool valid() const { return slot != 0xffffffffu; }
};

struct EngineStats {
  std::uint64_t events_processed = 0;
  std::uint64_t events_cancelled = 0;
  std::array<std::uint64_t, kEventKindCount> by_kind{};
  SimTime final_clock;
};

// Single-threaded discrete-event core. Events run in (time, insertion sequence)
// order, so equal-time events execute in the order they were scheduled.
class Engine {
 public:
  using Handler = std::function<void()>;

  explicit Engine(std::uint64_t seed) : rngs_(seed) {}
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;
  Engine(Engine&&) = default;
  Engine& operator=(Engine&&) = default;

  SimTime now() const { return clock_; }

  // Throws std::logic_error when time < now().
  EventId schedule(SimTime time, EventKind kind, NodeId target, Handler handler);
  EventId schedule_in(SimTime delay, EventKind kind, NodeId target, Handler handler) {
    return schedule(clock_ + delay, kind, target, std::move(handler));
  }
  // Returns false if the event already ran or was cancelled.
  bool cancel(EventId id);
  bool pending(EventId id) const;

  // Processes every event with time <= t_end, then sets the clock to t_end.
  const EngineStats& run_until(SimTime t_end);
  // Stops the current run_until after the running handler returns.
  void stop() { stop_requested_ = true; }

  const EngineStats& stats() const { return stats_; }
  std::size_t queued() const { return heap_.size(); }

  RngStream& rng_stream(const std::string& label) { return rngs_.stream(label); }
  std::uint64_t seed() const { return rngs_.seed(); }

 private:
  struct Entry {
    SimTime time;
    std::uint64_t seq;
    std::uint32_t slot;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  struct Slot {
    Handler handler;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::kTimerExpiry;
    bool live = false;
  };

  SimTime clock_;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_slots_;
  EngineStats stats_;
  RngRegistry rngs_;
  bool stop_requested_ = false;
};

}  // namespace wormbench
