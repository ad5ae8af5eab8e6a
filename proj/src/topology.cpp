#include "wormbench/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "wormbench/errors.hpp"

namespace wormbench {

const char* to_string(Role r) {
  switch (r) {
    case Role::kCore: return "core";
    case Role::kGateway: return "gateway";
    case Role::kEdge: return "edge";
    case Role::kClient: return "client";
    case Role::kServer: return "server";
  }
  return "?";
}

const char* to_string(ServerKind k) {
  switch (k) {
    case ServerKind::kHttp: return "HTTP";
    case ServerKind::kHttps: return "HTTPS";
    case ServerKind::kFtp: return "FTP";
    case ServerKind::kDns: return "DNS";
    case ServerKind::kMail: return "mail";
    case ServerKind::kStreaming: return "streaming";
    case ServerKind::kBackup: return "backup";
    case ServerKind::kInteractive: return "interactive";
    case ServerKind::kMisc: return "misc";
    case ServerKind::kSsh: return "SSH";
    case ServerKind::kWeb: return "web";
  }
  return "?";
}

Role role_from_string(std::string_view s) {
  for (Role r : {Role::kCore, Role::kGateway, Role::kEdge, Role::kClient, Role::kServer}) {
    if (s == to_string(r)) return r;
  }
  throw ConfigError("unknown node role '" + std::string(s) + "'");
}

ServerKind server_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kServerKindCount; ++i) {
    const auto k = static_cast<ServerKind>(i);
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown server kind '" + std::string(s) + "'");
}

std::uint16_t server_port(ServerKind k) {
  switch (k) {
    case ServerKind::kHttp: return 80;
    case ServerKind::kHttps: return 443;
    case ServerKind::kFtp: return 21;
    case ServerKind::kDns: return 53;
    case ServerKind::kMail: return 25;
    case ServerKind::kStreaming: return 554;
    case ServerKind::kBackup: return 9102;
    case ServerKind::kInteractive: return 23;
    case ServerKind::kMisc: return 7000;
    case ServerKind::kSsh: return 22;
    case ServerKind::kWeb: return 8080;
  }
  return 0;
}

const char* to_string(LinkClass c) {
  switch (c) {
    case LinkClass::kCoreCore: return "core-core";
    case LinkClass::kCoreGateway: return "core-gateway";
    case LinkClass::kGatewayEdge: return "gateway-edge";
    case LinkClass::kEdgeServer: return "edge-server";
    case LinkClass::kEdgeClient: return "edge-client";
  }
  return "?";
}

const LinkParam& LinkParams::of(LinkClass c) const {
  switch (c) {
    case LinkClass::kCoreCore: return core_core;
    case LinkClass::kCoreGateway: return core_gateway;
    case LinkClass::kGatewayEdge: return gateway_edge;
    case LinkClass::kEdgeServer: return edge_server;
    case LinkClass::kEdgeClient: return edge_client;
  }
  throw std::logic_error("LinkParams::of: bad class");
}

LinkParams LinkParams::category1() {
  return LinkParams{
      {50'000'000'000ULL, SimTime::from_ms(3)},
      {20'000'000'000ULL, SimTime::from_ms(2)},
      {10'000'000'000ULL, SimTime::from_us(250)},
      {2'500'000'000ULL, SimTime::from_us(5)},
      {100'000'000ULL, SimTime::from_us(5)},
  };
}

LinkParams LinkParams::category2() {
  return LinkParams{
      {40'000'000'000ULL, SimTime::from_ms(4)},
      {16'000'000'000ULL, SimTime::from_us(2500)},
      {8'000'000'000ULL, SimTime::from_us(300)},
      {2'000'000'000ULL, SimTime::from_us(10)},
      {80'000'000ULL, SimTime::from_us(10)},
  };
}

std::vector<NodeId> Topology::hosts() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes)
    if (is_host(n.role)) out.push_back(n.id);
  return out;
}

std::vector<NodeId> Topology::routers() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes)
    if (is_router(n.role)) out.push_back(n.id);
  return out;
}

std::size_t Topology::count(Role r) const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [r](const Node& n) { return n.role == r; }));
}

std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> Topology::adjacency() const {
  std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> adj(nodes.size());
  for (std::uint32_t i = 0; i < links.size(); ++i) {
    adj[links[i].a].emplace_back(links[i].b, i);
    adj[links[i].b].emplace_back(links[i].a, i);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

std::vector<std::uint32_t> Topology::degrees() const {
  std::vector<std::uint32_t> d(nodes.size(), 0);
  for (const auto& l : links) {
    d[l.a]++;
    d[l.b]++;
  }
  return d;
}

namespace {

template <typename Adj>
bool bfs_connected(std::size_t n, const Adj& neighbors_of) {
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> q{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (auto v : neighbors_of(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        q.push_back(v);
      }
    }
  }
  return visited == n;
}

}  // namespace

bool Topology::connected() const {
  const auto adj = adjacency();
  return bfs_connected(nodes.size(), [&](std::size_t u) {
    std::vector<std::size_t> out;
    out.reserve(adj[u].size());
    for (auto [v, l] : adj[u]) out.push_back(v);
    return out;
  });
}

void Topology::check_invariants() const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != i) throw std::logic_error("node ids must be dense and ordered");
    if ((nodes[i].role == Role::kServer) != nodes[i].server_kind.has_value()) {
      throw std::logic_error("server_kind must be set exactly for servers");
    }
  }
  auto allowed = [](Role x, Role y) {
    if (x > y) std::swap(x, y);
    if (x == Role::kCore) return y == Role::kCore || y == Role::kGateway;
    if (x == Role::kGateway) return y == Role::kEdge;
    if (x == Role::kEdge) return is_host(y);
    return false;
  };
  for (const auto& l : links) {
    if (l.a >= nodes.size() || l.b >= nodes.size() || l.a == l.b) throw std::logic_error("link endpoint out of range");
    if (!allowed(nodes[l.a].role, nodes[l.b].role)) {
      throw std::logic_error(std::string("link violates layer adjacency: ") + to_string(nodes[l.a].role) + "-" +
                             to_string(nodes[l.b].role));
    }
    if (l.bandwidth_bps == 0) throw std::logic_error("link bandwidth must be positive");
  }
  const auto deg = degrees();
  for (const auto& n : nodes) {
    if (is_host(n.role) && deg[n.id] != 1) throw std::logic_error("every host needs exactly one access link");
  }
  if (!connected()) throw std::logic_error("topology is not connected");
}

std::vector<std::uint32_t> AsGraph::degrees() const {
  std::vector<std::uint32_t> d(n, 0);
  for (auto [a, b] : edges) {
    d[a]++;
    d[b]++;
  }
  return d;
}

bool AsGraph::connected() const {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return bfs_connected(n, [&](std::size_t u) { return adj[u]; });
}

void PfpParams::validate() const {
  if (n_nodes < 3) throw ConfigError("pfp.n_nodes must be >= 3");
  if (!(p >= 0.0) || !(q >= 0.0) || p + q > 1.0) throw ConfigError("pfp.p and pfp.q must be >= 0 with p + q <= 1");
  if (!(delta >= 0.0)) throw ConfigError("pfp.delta must be >= 0");
}

namespace {

class PfpGrower {
 public:
  PfpGrower(const PfpParams& params, RngStream& rng) : params_(params), rng_(rng) {
    for (std::uint32_t i = 0; i < 3; ++i) add_node();
    add_edge(0, 1);
    add_edge(1, 2);
    add_edge(0, 2);
  }

  void step() {
    const double r = rng_.uniform01();
    const std::uint32_t fresh_hosts = r < params_.p + params_.q ? 1 : 2;
    const std::uint32_t peers = (r >= params_.p && r < params_.p + params_.q) ? 2 : 1;

    std::vector<std::uint32_t> hosts;
    for (std::uint32_t i = 0; i < fresh_hosts; ++i) {
      const auto h = pick(hosts);
      if (h != kNone) hosts.push_back(h);
    }
    const std::uint32_t fresh = add_node();
    for (auto h : hosts) add_edge(fresh, h);
    const std::uint32_t host = hosts.front();
    for (std::uint32_t i = 0; i < peers; ++i) {
      std::vector<std::uint32_t> excluded(adj_[host].begin(), adj_[host].end());
      excluded.push_back(host);
      const auto peer = pick(excluded);
      if (peer != kNone) add_edge(host, peer);
    }
  }

  AsGraph finish() {
    AsGraph g;
    g.n = static_cast<std::uint32_t>(adj_.size());
    g.edges = std::move(edges_);
    return g;
  }

  std::size_t size() const { return adj_.size(); }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  std::uint32_t add_node() {
    adj_.emplace_back();
    weight_.push_back(0.0);
    return static_cast<std::uint32_t>(adj_.size() - 1);
  }

  void add_edge(std::uint32_t a, std::uint32_t b) {
    adj_[a].insert(b);
    adj_[b].insert(a);
    edges_.emplace_back(std::min(a, b), std::max(a, b));
    refresh(a);
    refresh(b);
  }

  void refresh(std::uint32_t i) {
    const double k = static_cast<double>(adj_[i].size());
    weight_[i] = std::pow(k, 1.0 + params_.delta * std::log10(k));
  }

  // Preferential draw among nodes not in `excluded`.
  std::uint32_t pick(const std::vector<std::uint32_t>& excluded) {
    std::vector<char> skip(adj_.size(), 0);
    for (auto e : excluded) skip[e] = 1;
    double total = 0.0;
    for (std::size_t i = 0; i < adj_.size(); ++i)
      if (!skip[i]) total += weight_[i];
    if (total <= 0.0) return kNone;
    double u = rng_.uniform01() * total;
    std::uint32_t last = kNone;
    for (std::size_t i = 0; i < adj_.size(); ++i) {
      if (skip[i] || weight_[i] <= 0.0) continue;
      last = static_cast<std::uint32_t>(i);
      if (u < weight_[i]) return last;
      u -= weight_[i];
    }
    return last;
  }

  const PfpParams& params_;
  RngStream& rng_;
  std::vector<std::set<std::uint32_t>> adj_;
  std::vector<double> weight_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

std::uint32_t even_share(std::uint32_t total, std::uint32_t parts, std::uint32_t i) {
  return total / parts + (i < total % parts ? 1u : 0u);
}

NodeId add_node(Topology& t, Role role, std::uint32_t as_id, std::uint32_t subnet, std::optional<ServerKind> kind = {}) {
  Node n;
  n.id = static_cast<NodeId>(t.nodes.size());
  n.role = role;
  n.server_kind = kind;
  n.as_id = as_id;
  n.subnet_id = subnet;
  t.nodes.push_back(n);
  t.subnets[subnet].members.push_back(n.id);
  return n.id;
}

void add_link(Topology& t, NodeId a, NodeId b, LinkClass c, const LinkParams& params) {
  const LinkParam& p = params.of(c);
  t.links.push_back(LinkSpec{a, b, c, p.bandwidth_bps, p.delay, Link::kDefaultQueueCapacity});
}

}  // namespace

AsGraph generate_pfp(const PfpParams& params, RngStream& rng) {
  params.validate();
  PfpGrower grower(params, rng);
  while (grower.size() < params.n_nodes) grower.step();
  return grower.finish();
}

std::uint32_t HostMix::server_total() const {
  std::uint32_t n = 0;
  for (const auto& [k, c] : servers) n += c;
  return n;
}

AsNodes expand_as(Topology& topo, std::uint32_t as_id, const AsLayout& layout, const LinkParams& params) {
  if (layout.hosts == 0) throw ConfigError("expand_as: an AS needs at least one host");
  if (layout.cores == 0 || layout.gateways == 0 || layout.edges == 0 || layout.subnets == 0) {
    throw ConfigError("expand_as: core, gateway, edge and subnet counts must be >= 1");
  }
  const std::uint32_t S = layout.subnets;
  if (layout.gateways < S || layout.edges < S || layout.hosts < S) {
    throw ConfigError("expand_as: every subnet needs a gateway, an edge router and a host");
  }
  if (layout.mix.server_total() * S > layout.hosts) {
    throw ConfigError("expand_as: server mix exceeds the host count");
  }

  const auto first_subnet = static_cast<std::uint32_t>(topo.subnets.size());
  for (std::uint32_t m = 0; m < S; ++m) {
    Subnet s;
    s.id = first_subnet + m;
    s.as_id = as_id;
    s.index_in_as = m;
    topo.subnets.push_back(s);
  }
  topo.as_count = std::max(topo.as_count, as_id + 1);

  AsNodes out;
  for (std::uint32_t c = 0; c < layout.cores; ++c) {
    out.cores.push_back(add_node(topo, Role::kCore, as_id, first_subnet + c % S));
  }
  for (std::uint32_t i = 0; i < layout.cores; ++i)
    for (std::uint32_t j = i + 1; j < layout.cores; ++j) add_link(topo, out.cores[i], out.cores[j], LinkClass::kCoreCore, params);

  std::vector<std::vector<NodeId>> gw_by_subnet(S), edge_by_subnet(S);
  for (std::uint32_t m = 0; m < S; ++m) {
    const auto count = even_share(layout.gateways, S, m);
    for (std::uint32_t j = 0; j < count; ++j) {
      const NodeId g = add_node(topo, Role::kGateway, as_id, first_subnet + m);
      out.gateways.push_back(g);
      gw_by_subnet[m].push_back(g);
      const std::uint32_t primary = m % layout.cores;
      add_link(topo, g, out.cores[primary], LinkClass::kCoreGateway, params);
      if (layout.dual_homed_gateways && layout.cores >= 2) {
        std::uint32_t secondary = (m + 1 + j) % layout.cores;
        if (secondary == primary) secondary = (primary + 1) % layout.cores;
        add_link(topo, g, out.cores[secondary], LinkClass::kCoreGateway, params);
      }
    }
  }
  for (std::uint32_t m = 0; m < S; ++m) {
    const auto count = even_share(layout.edges, S, m);
    for (std::uint32_t e = 0; e < count; ++e) {
      const NodeId id = add_node(topo, Role::kEdge, as_id, first_subnet + m);
      out.edges.push_back(id);
      edge_by_subnet[m].push_back(id);
      add_link(topo, id, gw_by_subnet[m][e % gw_by_subnet[m].size()], LinkClass::kGatewayEdge, params);
    }
  }
  for (std::uint32_t m = 0; m < S; ++m) {
    const auto count = even_share(layout.hosts, S, m);
    std::vector<ServerKind> kinds;
    for (const auto& [kind, n] : layout.mix.servers)
      for (std::uint32_t i = 0; i < n; ++i) kinds.push_back(kind);
    for (std::uint32_t h = 0; h < count; ++h) {
      const bool server = h < kinds.size();
      const NodeId id = server ? add_node(topo, Role::kServer, as_id, first_subnet + m, kinds[h])
                               : add_node(topo, Role::kClient, as_id, first_subnet + m);
      out.hosts.push_back(id);
      add_link(topo, id, edge_by_subnet[m][h % edge_by_subnet[m].size()],
               server ? LinkClass::kEdgeServer : LinkClass::kEdgeClient, params);
    }
  }
  return out;
}

Topology build_category1() {
  Topology t;
  t.name = "category1";
  AsLayout layout;
  layout.cores = 4;
  layout.gateways = 8;
  layout.edges = 16;
  layout.hosts = 200;
  layout.subnets = 4;
  layout.dual_homed_gateways = true;
  layout.mix.servers = {{ServerKind::kHttp, 8}, {ServerKind::kHttps, 6}, {ServerKind::kDns, 1},
                        {ServerKind::kSsh, 1},  {ServerKind::kFtp, 1},   {ServerKind::kMail, 1}};
  expand_as(t, 0, layout, LinkParams::category1());
  assign_addresses(t);
  return t;
}

Topology build_category2(RngStream& rng) {
  PfpParams pfp;
  pfp.n_nodes = 10;
  const AsGraph g = generate_pfp(pfp, rng);
  const LinkParams params = LinkParams::category2();
  Topology t;
  t.name = "category2";
  std::vector<NodeId> first_core;
  for (std::uint32_t as = 0; as < g.n; ++as) {
    AsLayout layout;
    layout.cores = 1;
    layout.gateways = 2;
    layout.edges = even_share(152, g.n, as);
    layout.hosts = even_share(1162, g.n, as);
    layout.subnets = 1;
    layout.mix.servers = {{ServerKind::kHttp, 6}, {ServerKind::kHttps, 6}, {ServerKind::kDns, 1},
                          {ServerKind::kFtp, 1},  {ServerKind::kMail, 1},  {ServerKind::kMisc, 1}};
    first_core.push_back(expand_as(t, as, layout, params).cores.front());
  }
  for (auto [a, b] : g.edges) {
    add_link(t, first_core[a], first_core[b], LinkClass::kCoreCore, params);
    t.as_links.emplace_back(a, b);
  }
  assign_addresses(t);
  return t;
}

Topology build_pfp_topology(const PfpParams& params, const AsLayout& per_as, const LinkParams& link_params,
                            RngStream& rng) {
  const AsGraph g = generate_pfp(params, rng);
  Topology t;
  t.name = "pfp";
  std::vector<NodeId> first_core;
  for (std::uint32_t as = 0; as < g.n; ++as) first_core.push_back(expand_as(t, as, per_as, link_params).cores.front());
  for (auto [a, b] : g.edges) {
    add_link(t, first_core[a], first_core[b], LinkClass::kCoreCore, link_params);
    t.as_links.emplace_back(a, b);
  }
  assign_addresses(t);
  return t;
}

Topology build_flat(std::uint32_t hosts, LinkParam access) {
  if (hosts == 0) throw ConfigError("flat topology needs at least one host");
  Topology t;
  t.name = "flat";
  t.as_count = 1;
  t.subnets.push_back(Subnet{0, 0, 0, {}, {}});
  LinkParams params;
  params.edge_client = access;
  const NodeId router = add_node(t, Role::kEdge, 0, 0);
  for (std::uint32_t h = 0; h < hosts; ++h) add_link(t, add_node(t, Role::kClient, 0, 0), router, LinkClass::kEdgeClient, params);
  assign_addresses(t);
  return t;
}

NodeId AddressPlan::find(Ipv4 a) const {
  auto it = by_address.find(a.value);
  return it == by_address.end() ? kNoNode : it->second;
}

AddressPlan assign_addresses(Topology& topo) {
  if (topo.as_count > 200) throw ConfigError("address plan supports at most 200 ASs");
  std::vector<std::uint32_t> subnets_in_as(topo.as_count, 0);
  for (const auto& s : topo.subnets) subnets_in_as[s.as_id] = std::max(subnets_in_as[s.as_id], s.index_in_as + 1);
  for (auto n : subnets_in_as)
    if (n > 250) throw ConfigError("address plan supports at most 250 subnets per AS");

  for (auto& s : topo.subnets) {
    s.prefix = Cidr{Ipv4::from_octets(static_cast<std::uint8_t>(10 + s.as_id), static_cast<std::uint8_t>(s.index_in_as), 0, 0), 16};
    std::uint32_t hosts = 0, routers = 0;
    for (NodeId id : s.members) {
      Node& n = topo.nodes[id];
      std::uint32_t third, fourth;
      if (is_host(n.role)) {
        third = hosts / 254;
        fourth = hosts % 254 + 1;
        ++hosts;
      } else {
        third = 255 - routers / 254;
        fourth = routers % 254 + 1;
        ++routers;
      }
      n.address = Ipv4(s.prefix.base.value | (third << 8) | fourth);
    }
    if (hosts > 0 && routers > 0 && (hosts - 1) / 254 >= 255 - (routers - 1) / 254) {
      throw ConfigError("address plan: subnet " + s.prefix.to_string() + " is over capacity");
    }
  }
  return make_address_plan(topo);
}

AddressPlan make_address_plan(const Topology& topo) {
  AddressPlan plan;
  for (std::uint32_t as = 0; as < topo.as_count; ++as) {
    plan.as_prefix.push_back(Cidr{Ipv4::from_octets(static_cast<std::uint8_t>(10 + as), 0, 0, 0), 8});
  }
  for (const auto& s : topo.subnets) plan.subnet_prefix.push_back(s.prefix);
  for (const auto& n : topo.nodes) {
    if (!plan.by_address.emplace(n.address.value, n.id).second) {
      throw std::logic_error("duplicate address " + n.address.to_string());
    }
  }
  return plan;
}

Routing::Routing(const Topology& topo) : topo_(&topo), n_(topo.nodes.size()) {
  const auto adj = topo.adjacency();
  next_.assign(n_ * n_, kNoLink);
  dist_.assign(n_ * n_, 0xffffffffu);
  std::vector<std::uint32_t> d(n_);
  std::deque<NodeId> q;
  for (NodeId dst = 0; dst < n_; ++dst) {
    std::fill(d.begin(), d.end(), 0xffffffffu);
    d[dst] = 0;
    q.assign(1, dst);
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop_front();
      for (auto [v, l] : adj[u]) {
        if (d[v] == 0xffffffffu) {
          d[v] = d[u] + 1;
          q.push_back(v);
        }
      }
    }
    for (NodeId u = 0; u < n_; ++u) {
      if (d[u] == 0xffffffffu) throw std::logic_error("compute_routes: topology is disconnected");
      dist_[u * n_ + dst] = d[u];
      if (u == dst) continue;
      // adjacency is sorted by neighbor id, so the first match is the lowest.
      for (auto [v, l] : adj[u]) {
        if (d[v] + 1 == d[u]) {
          next_[u * n_ + dst] = l;
          break;
        }
      }
    }
  }
}

NodeId Routing::next_hop(NodeId at, NodeId dst) const {
  const auto l = next_link(at, dst);
  if (l == kNoLink) return kNoNode;
  const auto& spec = topo_->links[l];
  return spec.a == at ? spec.b : spec.a;
}

std::vector<NodeId> Routing::path(NodeId from, NodeId to) const {
  std::vector<NodeId> p{from};
  NodeId at = from;
  while (at != to) {
    at = next_hop(at, to);
    p.push_back(at);
    if (p.size() > n_) throw std::logic_error("routing loop");
  }
  return p;
}

std::vector<std::uint32_t> Routing::path_links(NodeId from, NodeId to) const {
  std::vector<std::uint32_t> out;
  NodeId at = from;
  while (at != to) {
    out.push_back(next_link(at, to));
    at = next_hop(at, to);
    if (out.size() > n_) throw std::logic_error("routing loop");
  }
  return out;
}

Resolution resolve(const Topology& topo, const AddressPlan& plan, Ipv4 a) {
  Resolution r;
  const NodeId id = plan.find(a);
  if (id != kNoNode) {
    if (is_host(topo.nodes[id].role)) {
      r.host = id;
    } else {
      r.drop_router = id;
    }
    return r;
  }
  for (const auto& s : topo.subnets) {
    if (!s.prefix.contains(a)) continue;
    NodeId best = kNoNode;
    for (NodeId m : s.members) {
      if (topo.nodes[m].role == Role::kEdge) {
        best = m;
        break;
      }
    }
    if (best == kNoNode) {
      for (NodeId m : s.members)
        if (is_router(topo.nodes[m].role)) {
          best = m;
          break;
        }
    }
    r.drop_router = best;
    return r;
  }
  if (a.octet(0) >= 10 && a.octet(0) < 10 + topo.as_count) {
    const std::uint32_t as = a.octet(0) - 10u;
    for (const auto& n : topo.nodes) {
      if (n.as_id == as && n.role == Role::kCore) return Resolution{kNoNode, n.id};
    }
    for (const auto& n : topo.nodes) {
      if (n.as_id == as && is_router(n.role)) return Resolution{kNoNode, n.id};
    }
  }
  return r;
}

}  // namespace wormbench
