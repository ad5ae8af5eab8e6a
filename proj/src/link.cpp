#include "wormbench/link.hpp"

#include <algorithm>
#include <stdexcept>

namespace wormbench {

Link::Link(NodeId a, NodeId b, std::uint64_t bandwidth_bps, SimTime propagation_delay,
           std::uint32_t queue_capacity)
    : a_(a), b_(b), bandwidth_bps_(bandwidth_bps), delay_(propagation_delay), capacity_(queue_capacity) {
  if (bandwidth_bps_ == 0) throw std::invalid_argument("Link: bandwidth must be positive");
  if (delay_ < SimTime()) throw std::invalid_argument("Link: negative propagation delay");
}

Direction Link::direction_from(NodeId from) const {
  if (from == a_) return Direction::kAtoB;
  if (from == b_) return Direction::kBtoA;
  throw std::logic_error("Link::direction_from: node is not an endpoint of this link");
}

SimTime Link::serialization_time(std::uint32_t size_bytes) const {
  // ceil(bits * 1e9 / bandwidth); bits <= 2^19 so the product fits in 64 bits.
  const std::uint64_t num = static_cast<std::uint64_t>(size_bytes) * 8ULL * 1'000'000'000ULL;
  return SimTime::from_ns(static_cast<std::int64_t>((num + bandwidth_bps_ - 1) / bandwidth_bps_));
}

std::size_t Link::queue_length(Direction d, SimTime t) {
  auto& q = dir(d).waiting_starts;
  while (!q.empty() && q.front() <= t) q.pop_front();
  return q.size();
}

std::optional<SimTime> Link::transmit(Direction d, std::uint32_t size_bytes, SimTime t) {
  if (d != Direction::kAtoB && d != Direction::kBtoA) {
    throw std::logic_error("Link::transmit: unknown direction");
  }
  DirState& s = dir(d);
  s.counters.submitted++;
  const SimTime start = std::max(t, s.busy_until);
  if (start > t) {
    if (queue_length(d, t) >= capacity_) {
      s.counters.dropped++;
      return std::nullopt;
    }
    s.waiting_starts.push_back(start);
  }
  const SimTime end = start + serialization_time(size_bytes);
  s.busy_until = end;
  s.counters.bits_serialized += static_cast<std::uint64_t>(size_bytes) * 8ULL;
  return end + delay_;
}

}  // namespace wormbench
