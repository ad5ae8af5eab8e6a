#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wormbench/engine.hpp"
#include "wormbench/ipv4.hpp"
#include "wormbench/rng.hpp"
#include "wormbench/sim_time.hpp"
#include "wormbench/topology.hpp"
#include "wormbench/traffic.hpp"

namespace wormbench {

// Disjoint, sorted union of CIDR blocks with uniform indexing.
class AddressSet {
 public:
  AddressSet() = default;
  // Blocks nested inside another block are dropped.
  explicit AddressSet(std::vector<Cidr> blocks);
  const std::vector<Cidr>& blocks() const { return blocks_; }
  std::uint64_t size() const { return total_; }
  bool empty() const { return total_ == 0; }
  bool contains(Ipv4 a) const;
  Ipv4 at(std::uint64_t i) const;
  // Index of `a`; requires contains(a).
  std::uint64_t index_of(Ipv4 a) const;
  // Blocks of this set inside `prefix`.
  AddressSet intersect(const Cidr& prefix) const;

 private:
  std::vector<Cidr> blocks_;
  std::vector<std::uint64_t> starts_;  // cumulative index of each block
  std::uint64_t total_ = 0;
};

enum class LocalityClass : std::uint8_t { kRandom = 0, kSameA = 1, kSameB = 2, kSameSubnet = 3 };
inline constexpr std::size_t kLocalityClassCount = 4;
const char* to_string(LocalityClass c);

struct LocalPreference {
  double random = 1.0;
  double same_a = 0.0;       // same first octet
  double same_b = 0.0;       // same first two octets
  double same_subnet = 0.0;  // same subnet in the address plan
  double weight(LocalityClass c) const;
  bool operator==(const LocalPreference&) const = default;
};

struct Scanning {
  enum class Kind : std::uint8_t { kUniformRandom, kLocalPreference };
  Kind kind = Kind::kUniformRandom;
  LocalPreference weights;
  bool operator==(const Scanning&) const = default;
};

// A pool of hosts eligible for infection: a role, narrowed by server kind for servers.
struct HostPool {
  Role role = Role::kServer;
  std::optional<ServerKind> kind;
  bool matches(const Node& n) const;
  std::string to_string() const;
  static HostPool parse(const std::string& text);  // "client" | "server" | "server:HTTP"
  bool operator==(const HostPool&) const = default;
};

struct VulnerableSelector {
  std::vector<HostPool> pools;
  std::uint32_t count = 0;
  bool operator==(const VulnerableSelector&) const = default;
};

enum class SirMode : std::uint8_t { kSI, kSIR };

struct WormConfig {
  std::string name = "worm";
  Transport transport = Transport::kUdp;
  std::uint16_t infection_port = 1434;
  std::uint32_t payload_length = 376;
  std::optional<Distribution> probe_interval;           // UDP only
  std::optional<std::uint32_t> concurrent_connections;  // TCP only
  Scanning scanning;
  double recovery_probability = 0.0;  // per simulated millisecond
  // Empty: the populated /24 blocks of the topology.
  std::vector<Cidr> scan_range;
  VulnerableSelector vulnerable;
  // Explicit origins by run; when empty, origins come from a seeded permutation.
  std::vector<NodeId> origins;
  std::optional<SimTime> start;  // default: end of warm-up

  SirMode mode() const { return recovery_probability > 0.0 ? SirMode::kSIR : SirMode::kSI; }
  // Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const WormConfig&) const = default;
};

// Scan range used when WormConfig::scan_range is empty.
std::vector<Cidr> populated_blocks(const Topology& topo);

struct TargetChoice {
  Ipv4 address;
  LocalityClass drawn = LocalityClass::kRandom;  // class picked by the weights
  bool fell_back = false;                         // drawn class was empty
};

// Per-host target generator. Class ranges are the scan range intersected
// with the host's /8, /16 or subnet prefix; the host itself is never chosen.
class TargetChooser {
 public:
  TargetChooser(const Scanning& scanning, const AddressSet& range, Ipv4 self, Cidr subnet);
  TargetChoice choose(RngStream& rng) const;
  std::uint64_t class_size(LocalityClass c) const;

 private:
  Ipv4 draw_from(const AddressSet& s, RngStream& rng) const;

  Scanning scanning_;
  Ipv4 self_;
  AddressSet classes_[kLocalityClassCount];
};

enum class HostStatus : std::uint8_t { kSusceptible, kInfected, kRecovered };
const char* to_string(HostStatus s);

struct HostInfectionState {
  HostStatus status = HostStatus::kSusceptible;
  SimTime infected_at = SimTime::max();
  SimTime recovered_at = SimTime::max();
  NodeId infector = kNoNode;
};

struct StateTransition {
  SimTime time;
  NodeId node = kNoNode;
  HostStatus from = HostStatus::kSusceptible;
  HostStatus to = HostStatus::kSusceptible;
};

// SIR bookkeeping for one propagation run. Only S->I and I->R are possible.
class InfectionTracker {
 public:
  InfectionTracker(std::size_t node_count, const std::vector<NodeId>& vulnerable);
  bool vulnerable(NodeId n) const { return vulnerable_[n] != 0; }
  const HostInfectionState& state(NodeId n) const { return states_[n]; }
  // Infects a susceptible vulnerable host; returns false (and changes
  // nothing) otherwise. infector is kNoNode only for the origin.
  bool infect(NodeId n, NodeId infector, SimTime t);
  // Throws std::logic_error unless n is infected.
  void recover(NodeId n, SimTime t);
  std::size_t infected() const { return infected_; }
  std::size_t recovered() const { return recovered_; }
  const std::vector<StateTransition>& transitions() const { return transitions_; }

 private:
  std::vector<HostInfectionState> states_;
  std::vector<std::uint8_t> vulnerable_;
  std::vector<StateTransition> transitions_;
  std::size_t infected_ = 0;
  std::size_t recovered_ = 0;
};

// Recovery is checked at every whole millisecond after infection; the first
// successful check is found with one geometric draw. SimTime::max() if p == 0.
SimTime recovery_time(SimTime infected_at, double p, RngStream& rng);

// Deterministic sample of the selector's pools (uniform over their union,
// without replacement), in ascending node order. Throws ConfigError when the
// pools hold fewer hosts than requested.
std::vector<NodeId> select_vulnerable(const Topology& topo, const VulnerableSelector& sel, std::uint64_t seed);

// Origin of run k: the explicit origin if configured, else element k of a
// seeded permutation of the vulnerable set. Throws ConfigError if an explicit
// origin is not vulnerable or k exceeds the number of candidates.
NodeId select_origin(const WormConfig& cfg, const std::vector<NodeId>& vulnerable, std::uint64_t seed,
                     std::uint32_t run);

struct InfectionRecord {
  SimTime time;
  Ipv4 attacker;
  Ipv4 victim;
  Transport transport = Transport::kUdp;
  std::uint64_t flow_id = 0;  // id of the packet completing the infection
  bool operator==(const InfectionRecord&) const = default;
};

inline constexpr const char* kGroundTruthHeader = "time_ns,attacker_ip,victim_ip,transport,flow_id";

void write_ground_truth(std::ostream& out, const std::vector<InfectionRecord>& records);
// Throws AnalysisError with the 1-based line number of the first bad row.
std::vector<InfectionRecord> read_ground_truth(std::istream& in);

}  // namespace wormbench
