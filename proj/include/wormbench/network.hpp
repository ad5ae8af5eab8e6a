#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wormbench/engine.hpp"
#include "wormbench/link.hpp"
#include "wormbench/packet.hpp"
#include "wormbench/tcp.hpp"
#include "wormbench/topology.hpp"
#include "wormbench/traffic.hpp"
#include "wormbench/worm.hpp"

namespace wormbench {

// Receives every packet observed at a tapped node. Host taps see packets
// when sent and when delivered; router taps see packets arriving at them.
class CaptureSink {
 public:
  virtual ~CaptureSink() = default;
  virtual void record(NodeId node, SimTime t, const Packet& p) = 0;
};

struct WormSetup {
  WormConfig config;
  std::vector<NodeId> vulnerable;  // sorted
  NodeId origin = kNoNode;
  SimTime start;
};

struct SimulationOptions {
  std::uint64_t seed = 1;
  SimTime duration = SimTime::from_s(300);
  bool background = true;
  TrafficMix mix;
  std::optional<WormSetup> worm;
  CaptureSink* sink = nullptr;
  bool router_taps = false;
  SimTime series_bin = SimTime::from_ms(10);
  TcpConfig tcp;
  // Per-connection RTO: max(rto_rtt_factor x static path RTT, rto_floor).
  SimTime rto_floor = SimTime::from_ms(200);
  double rto_rtt_factor = 2.0;
  // A UDP or ICMP exchange gives up on missing replies after this long.
  SimTime udp_timeout = SimTime::from_s(2);
};

struct FlowRecord {
  std::uint64_t id = 0;
  NodeId client = kNoNode;
  NodeId server = kNoNode;
  std::string profile;
  Transport transport = Transport::kTcp;
  SimTime start;
  SimTime end = SimTime::max();  // max while unfinished
  std::uint64_t planned_bytes = 0;  // request plus reply application bytes
  std::uint64_t delivered_bytes = 0;
  bool completed = false;
  bool failed = false;
  double goodput_bps() const;  // delivered bytes over duration; 0 if unfinished
};

struct WormStats {
  std::uint64_t probes_sent = 0;
  std::uint64_t connections_started = 0;
  std::uint64_t connections_completed = 0;
  std::uint64_t connections_failed = 0;
  std::uint64_t locality_fallbacks = 0;
  std::uint64_t class_draws[kLocalityClassCount] = {0, 0, 0, 0};
  std::uint32_t max_concurrent_connections = 0;  // per host, over the run
};

struct LinkUsage {
  std::uint64_t worm_bytes = 0;
  std::uint64_t background_bytes = 0;
  std::uint64_t dropped_packets = 0;
};

struct NetworkStats {
  std::uint64_t packets_sent = 0;       // handed to the network by hosts
  std::uint64_t packets_delivered = 0;  // reached the destination host
  std::uint64_t queue_drops = 0;
  std::uint64_t unassigned_drops = 0;  // discarded at the owning router
  std::uint64_t unroutable_drops = 0;  // no router owns the address
  std::uint64_t rst_sent = 0;
  std::uint64_t udp_timeouts = 0;
  std::uint64_t port_reuses = 0;
};

struct SimulationResult {
  NetworkStats network;
  WormStats worm;
  std::vector<LinkUsage> links;
  std::vector<FlowRecord> flows;
  std::vector<InfectionRecord> infections;
  std::vector<StateTransition> transitions;
  std::vector<std::uint64_t> background_series;  // bytes sent per bin
  SimTime series_bin;
  std::uint64_t events_processed = 0;
  std::size_t final_infected = 0;
  std::size_t final_recovered = 0;
  NodeId origin = kNoNode;
};

// One packet-level run over a topology: background traffic, optionally a worm.
class Simulation {
 public:
  Simulation(const Topology& topo, SimulationOptions options);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Runs to options.duration. Can only be called once.
  const SimulationResult& run();
  const SimulationResult& result() const;
  const Routing& routing() const;
  const AddressPlan& address_plan() const;
  const InfectionTracker* tracker() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Static round-trip estimate between two nodes: twice the sum of propagation
// delays plus full-size serialization on every hop.
SimTime path_rtt(const Topology& topo, const Routing& routing, NodeId a, NodeId b);

}  // namespace wormbench
