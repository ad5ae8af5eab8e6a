#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wormbench/engine.hpp"
#include "wormbench/ipv4.hpp"
#include "wormbench/link.hpp"
#include "wormbench/rng.hpp"
#include "wormbench/sim_time.hpp"

namespace wormbench {

enum class Role : std::uint8_t { kCore, kGateway, kEdge, kClient, kServer };

enum class ServerKind : std::uint8_t {
  kHttp,
  kHttps,
  kFtp,
  kDns,
  kMail,
  kStreaming,
  kBackup,
  kInteractive,
  kMisc,
  kSsh,
  kWeb,
};
inline constexpr std::size_t kServerKindCount = 11;

const char* to_string(Role r);
const char* to_string(ServerKind k);
Role role_from_string(std::string_view s);
ServerKind server_kind_from_string(std::string_view s);
// Well-known listening port of each server kind; distinct across kinds.
std::uint16_t server_port(ServerKind k);

inline bool is_router(Role r) { return r == Role::kCore || r == Role::kGateway || r == Role::kEdge; }
inline bool is_host(Role r) { return r == Role::kClient || r == Role::kServer; }

enum class LinkClass : std::uint8_t { kCoreCore, kCoreGateway, kGatewayEdge, kEdgeServer, kEdgeClient };
const char* to_string(LinkClass c);

struct LinkParam {
  std::uint64_t bandwidth_bps = 0;
  SimTime delay;
};

// Bandwidth and delay per link class.
struct LinkParams {
  LinkParam core_core;
  LinkParam core_gateway;
  LinkParam gateway_edge;
  LinkParam edge_server;
  LinkParam edge_client;

  const LinkParam& of(LinkClass c) const;
  static LinkParams category1();
  static LinkParams category2();
};

struct Node {
  NodeId id = kNoNode;
  Role role = Role::kClient;
  std::optional<ServerKind> server_kind;
  Ipv4 address;
  std::uint32_t as_id = 0;
  std::uint32_t subnet_id = 0;  // index into Topology::subnets
};

struct LinkSpec {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  LinkClass link_class = LinkClass::kCoreCore;
  std::uint64_t bandwidth_bps = 0;
  SimTime delay;
  std::uint32_t queue_capacity = Link::kDefaultQueueCapacity;
};

struct Subnet {
  std::uint32_t id = 0;
  std::uint32_t as_id = 0;
  std::uint32_t index_in_as = 0;
  Cidr prefix;
  std::vector<NodeId> members;
};

struct Topology {
  std::string name;
  std::vector<Node> nodes;
  std::vector<LinkSpec> links;
  std::vector<Subnet> subnets;
  std::uint32_t as_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> as_links;

  std::vector<NodeId> hosts() const;
  std::vector<NodeId> routers() const;
  std::size_t count(Role r) const;
  // Neighbor lists as (neighbor, link index), sorted by neighbor id.
  std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> adjacency() const;
  std::vector<std::uint32_t> degrees() const;
  bool connected() const;
  // Throws std::logic_error naming the first violated structural rule.
  void check_invariants() const;
};

// Undirected AS-level graph.
struct AsGraph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::vector<std::uint32_t> degrees() const;
  bool connected() const;
};

struct PfpParams {
  std::uint32_t n_nodes = 1000;
  double p = 0.3;
  double q = 0.1;
  double delta = 0.048;

  // Throws ConfigError.
  void validate() const;
};

// Positive-feedback preference growth. Starts from a triangle; each step adds
// one node:
//   with probability p: new node -> 1 host, plus 1 internal link host -> peer;
//   with probability q: new node -> 1 host, plus 2 internal links host -> peers;
//   otherwise:          new node -> 2 hosts, plus 1 internal link host -> peer.
// Hosts and peers are drawn with probability proportional to k^(1 + delta*log10 k).
AsGraph generate_pfp(const PfpParams& params, RngStream& rng);

struct HostMix {
  // Servers per subnet; the remaining hosts are clients.
  std::vector<std::pair<ServerKind, std::uint32_t>> servers;
  std::uint32_t server_total() const;
};

struct AsLayout {
  std::uint32_t cores = 1;
  std::uint32_t gateways = 1;
  std::uint32_t edges = 1;
  std::uint32_t hosts = 1;
  std::uint32_t subnets = 1;
  bool dual_homed_gateways = false;
  HostMix mix;
};

struct AsNodes {
  std::vector<NodeId> cores;
  std::vector<NodeId> gateways;
  std::vector<NodeId> edges;
  std::vector<NodeId> hosts;
};

// Appends one AS's three-layer hierarchy to `topo`: cores in a full mesh,
// gateways homed on one (or two) cores, each edge on one gateway of its subnet,
// each host on one edge of its subnet. Throws ConfigError on empty layers.
AsNodes expand_as(Topology& topo, std::uint32_t as_id, const AsLayout& layout, const LinkParams& params);

Topology build_category1();
Topology build_category2(RngStream& rng);
// PFP AS graph with one hierarchy per AS; inter-AS links join the ASs' first cores.
Topology build_pfp_topology(const PfpParams& params, const AsLayout& per_as, const LinkParams& link_params,
                            RngStream& rng);
// One router with `hosts` attached hosts in a single /16.
Topology build_flat(std::uint32_t hosts, LinkParam access);

struct AddressPlan {
  std::unordered_map<std::uint32_t, NodeId> by_address;
  std::vector<Cidr> as_prefix;      // by AS id
  std::vector<Cidr> subnet_prefix;  // by subnet id

  NodeId find(Ipv4 a) const;
};

// AS n gets (10+n).0.0.0/8 and its m-th subnet (10+n).m.0.0/16. Hosts are
// numbered from .0.1 upwards, routers from .255.1 upwards, skipping .0/.255
// host octets. Writes addresses into the nodes. Throws ConfigError past 200
// ASs or 250 subnets per AS.
AddressPlan assign_addresses(Topology& topo);
// Plan for a topology whose nodes already carry addresses (e.g. imported ones).
AddressPlan make_address_plan(const Topology& topo);

inline constexpr std::uint32_t kNoLink = 0xffffffffu;

// Static hop-count shortest-path routing. Among equal-length next hops the
// neighbor with the lowest node id wins.
class Routing {
 public:
  // Throws std::logic_error if the topology is disconnected.
  explicit Routing(const Topology& topo);

  std::size_t node_count() const { return n_; }
  // Link to take from `at` towards `dst`; kNoLink when at == dst.
  std::uint32_t next_link(NodeId at, NodeId dst) const { return next_[static_cast<std::size_t>(at) * n_ + dst]; }
  NodeId next_hop(NodeId at, NodeId dst) const;
  std::uint32_t hops(NodeId from, NodeId to) const { return dist_[static_cast<std::size_t>(from) * n_ + to]; }
  std::vector<NodeId> path(NodeId from, NodeId to) const;
  std::vector<std::uint32_t> path_links(NodeId from, NodeId to) const;

 private:
  const Topology* topo_;
  std::size_t n_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> dist_;
};

// Where packets to `a` end up: the host itself when assigned, otherwise the
// router owning the longest matching prefix (a subnet's first edge router for
// a /16 match, the AS's first core for a /8 match), or kNoNode.
struct Resolution {
  NodeId host = kNoNode;
  NodeId drop_router = kNoNode;
};
Resolution resolve(const Topology& topo, const AddressPlan& plan, Ipv4 a);

}  // namespace wormbench
