#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "wormbench/engine.hpp"
#include "wormbench/sim_time.hpp"

namespace wormbench {

enum class Direction : std::uint8_t { kAtoB = 0, kBtoA = 1 };

struct LinkCounters {
  std::uint64_t submitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t bits_serialized = 0;
};

// Point-to-point full-duplex link. Each direction has its own transmitter:
// packets serialize one at a time in FIFO order and wait in a drop-tail queue
// of at most queue_capacity packets.
class Link {
 public:
  static constexpr std::uint32_t kDefaultQueueCapacity = 100;

  Link(NodeId a, NodeId b, std::uint64_t bandwidth_bps, SimTime propagation_delay,
       std::uint32_t queue_capacity = kDefaultQueueCapacity);

  NodeId a() const { return a_; }
  NodeId b() const { return b_; }
  std::uint64_t bandwidth_bps() const { return bandwidth_bps_; }
  SimTime propagation_delay() const { return delay_; }
  std::uint32_t queue_capacity() const { return capacity_; }

  NodeId far_end(Direction d) const { return d == Direction::kAtoB ? b_ : a_; }
  // Direction of travel when sending from `from`. Throws if `from` is not an endpoint.
  Direction direction_from(NodeId from) const;

  SimTime serialization_time(std::uint32_t size_bytes) const;

  // Accepts a packet at time t. Returns its delivery time at the far end, or
  // nullopt if the queue is full and the packet is dropped.
  std::optional<SimTime> transmit(Direction d, std::uint32_t size_bytes, SimTime t);

  // Packets waiting (not yet serializing) in direction d at time t.
  std::size_t queue_length(Direction d, SimTime t);
  SimTime busy_until(Direction d) const { return dir(d).busy_until; }
  const LinkCounters& counters(Direction d) const { return dir(d).counters; }
  // Marks one packet accepted by transmit() as having reached the far end.
  void note_delivered(Direction d) { dir(d).counters.delivered++; }

 private:
  struct DirState {
    SimTime busy_until;
    std::deque<SimTime> waiting_starts;
    LinkCounters counters;
  };
  DirState& dir(Direction d) { return dirs_[static_cast<int>(d)]; }
  const DirState& dir(Direction d) const { return dirs_[static_cast<int>(d)]; }

  NodeId a_;
  NodeId b_;
  std::uint64_t bandwidth_bps_;
  SimTime delay_;
  std::uint32_t capacity_;
  DirState dirs_[2];
};

}  // namespace wormbench
