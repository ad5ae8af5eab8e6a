#include "wormbench/worm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wormbench/errors.hpp"
#include "wormbench/packet.hpp"

namespace wormbench {

namespace {

Cidr normalized(Cidr c) {
  c.base = Ipv4(c.base.value & prefix_mask(c.length));
  return c;
}

bool covers(const Cidr& outer, const Cidr& inner) { return outer.length <= inner.length && outer.contains(inner.base); }

}  // namespace

AddressSet::AddressSet(std::vector<Cidr> blocks) {
  for (auto& b : blocks) {
    if (b.length < 0 || b.length > 32) throw ConfigError("scan range: bad prefix length");
    b = normalized(b);
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const Cidr& x, const Cidr& y) { return x.base != y.base ? x.base < y.base : x.length < y.length; });
  for (const auto& b : blocks) {
    // Sorted by base: a block can only be covered by the last kept one.
    if (!blocks_.empty() && covers(blocks_.back(), b)) continue;
    blocks_.push_back(b);
  }
  for (const auto& b : blocks_) {
    starts_.push_back(total_);
    total_ += b.size();
  }
}

bool AddressSet::contains(Ipv4 a) const {
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), a, [](Ipv4 v, const Cidr& c) { return v < c.base; });
  return it != blocks_.begin() && std::prev(it)->contains(a);
}

Ipv4 AddressSet::at(std::uint64_t i) const {
  if (i >= total_) throw std::out_of_range("AddressSet::at");
  auto it = std::upper_bound(starts_.begin(), starts_.end(), i);
  const std::size_t k = static_cast<std::size_t>(std::prev(it) - starts_.begin());
  return blocks_[k].at(i - starts_[k]);
}

std::uint64_t AddressSet::index_of(Ipv4 a) const {
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), a, [](Ipv4 v, const Cidr& c) { return v < c.base; });
  if (it == blocks_.begin() || !std::prev(it)->contains(a)) throw std::out_of_range("AddressSet::index_of");
  const std::size_t k = static_cast<std::size_t>(std::prev(it) - blocks_.begin());
  return starts_[k] + (a.value - blocks_[k].base.value);
}

AddressSet AddressSet::intersect(const Cidr& raw) const {
  const Cidr prefix = normalized(raw);
  std::vector<Cidr> out;
  for (const auto& b : blocks_) {
    if (covers(prefix, b)) {
      out.push_back(b);
    } else if (covers(b, prefix)) {
      out.push_back(prefix);
    }
  }
  return AddressSet(std::move(out));
}

const char* to_string(LocalityClass c) {
  switch (c) {
    case LocalityClass::kRandom: return "random";
    case LocalityClass::kSameA: return "same_a";
    case LocalityClass::kSameB: return "same_b";
    case LocalityClass::kSameSubnet: return "same_subnet";
  }
  return "?";
}

double LocalPreference::weight(LocalityClass c) const {
  switch (c) {
    case LocalityClass::kRandom: return random;
    case LocalityClass::kSameA: return same_a;
    case LocalityClass::kSameB: return same_b;
    case LocalityClass::kSameSubnet: return same_subnet;
  }
  return 0.0;
}

bool HostPool::matches(const Node& n) const {
  if (n.role != role) return false;
  return !kind || (n.server_kind && *n.server_kind == *kind);
}

std::string HostPool::to_string() const {
  std::string s = wormbench::to_string(role);
  if (kind) s += std::string(":") + wormbench::to_string(*kind);
  return s;
}

HostPool HostPool::parse(const std::string& text) {
  HostPool p;
  const auto colon = text.find(':');
  try {
    p.role = role_from_string(text.substr(0, colon));
    if (colon != std::string::npos) p.kind = server_kind_from_string(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("vulnerable pool '" + text + "': expected client, server or server:<kind>");
  }
  if (!is_host(p.role)) throw ConfigError("vulnerable pool '" + text + "': routers cannot be infected");
  if (p.kind && p.role != Role::kServer) throw ConfigError("vulnerable pool '" + text + "': only servers have a kind");
  return p;
}

void WormConfig::validate() const {
  if (transport == Transport::kIcmp) throw ConfigError("worm.transport: must be TCP or UDP");
  if (infection_port == 0) throw ConfigError("worm.infection_port: must be in 1..65535");
  if (payload_length == 0) throw ConfigError("worm.payload_length: must be positive");
  if (transport == Transport::kUdp) {
    if (!probe_interval) throw ConfigError("worm.probe_interval: required for UDP worms");
    if (concurrent_connections) throw ConfigError("worm.concurrent_connections: only valid for TCP worms");
    if (payload_length > kMaxUdpPayload) throw ConfigError("worm.payload_length: UDP probes carry at most 1472 bytes");
    probe_interval->validate("worm.probe_interval");
    if (probe_interval->kind == Distribution::Kind::kConstant && probe_interval->a <= 0.0) {
      throw ConfigError("worm.probe_interval: must be positive");
    }
    if (probe_interval->kind == Distribution::Kind::kUniform && probe_interval->b <= 0.0) {
      throw ConfigError("worm.probe_interval: must be positive");
    }
  } else {
    if (!concurrent_connections) throw ConfigError("worm.concurrent_connections: required for TCP worms");
    if (*concurrent_connections == 0) throw ConfigError("worm.concurrent_connections: must be >= 1");
    if (probe_interval) throw ConfigError("worm.probe_interval: only valid for UDP worms");
  }
  if (scanning.kind == Scanning::Kind::kLocalPreference) {
    const auto& w = scanning.weights;
    for (double x : {w.random, w.same_a, w.same_b, w.same_subnet}) {
      if (!(x >= 0.0) || x > 1.0) throw ConfigError("worm.scanning.weights: each weight must be in [0, 1]");
    }
    const double sum = w.random + w.same_a + w.same_b + w.same_subnet;
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "worm.scanning.weights: must sum to 1 (got " << sum << ")";
      throw ConfigError(os.str());
    }
  }
  if (!(recovery_probability >= 0.0) || !(recovery_probability < 1.0)) {
    throw ConfigError("worm.recovery_probability: must be in [0, 1)");
  }
  if (vulnerable.pools.empty()) throw ConfigError("worm.vulnerable.pools: at least one pool required");
  if (vulnerable.count == 0) throw ConfigError("worm.vulnerable.count: must be >= 1");
  if (start && *start < SimTime{}) throw ConfigError("worm.start: must be >= 0");
}

std::vector<Cidr> populated_blocks(const Topology& topo) {
  std::set<std::uint32_t> blocks;
  for (const auto& n : topo.nodes)
    if (is_host(n.role)) blocks.insert(n.address.value & prefix_mask(24));
  std::vector<Cidr> out;
  for (auto b : blocks) out.push_back(Cidr{Ipv4(b), 24});
  return out;
}

TargetChooser::TargetChooser(const Scanning& scanning, const AddressSet& range, Ipv4 self, Cidr subnet)
    : scanning_(scanning), self_(self) {
  classes_[0] = range;
  if (scanning.kind == Scanning::Kind::kLocalPreference) {
    classes_[1] = range.intersect(Cidr{self, 8});
    classes_[2] = range.intersect(Cidr{self, 16});
    classes_[3] = range.intersect(subnet);
  }
  if (class_size(LocalityClass::kRandom) == 0) throw ConfigError("worm.scan_range: contains no address but the scanner");
}

std::uint64_t TargetChooser::class_size(LocalityClass c) const {
  const auto& s = classes_[static_cast<int>(c)];
  return s.size() - (s.contains(self_) ? 1 : 0);
}

Ipv4 TargetChooser::draw_from(const AddressSet& s, RngStream& rng) const {
  if (!s.contains(self_)) return s.at(rng.uniform_int(0, s.size() - 1));
  // Skip over the scanner's own address.
  const std::uint64_t self_idx = s.index_of(self_);
  std::uint64_t i = rng.uniform_int(0, s.size() - 2);
  if (i >= self_idx) ++i;
  return s.at(i);
}

TargetChoice TargetChooser::choose(RngStream& rng) const {
  TargetChoice c;
  if (scanning_.kind == Scanning::Kind::kUniformRandom) {
    c.address = draw_from(classes_[0], rng);
    return c;
  }
  const auto& w = scanning_.weights;
  const double u = rng.uniform01();
  double acc = 0.0;
  c.drawn = LocalityClass::kSameSubnet;
  for (int k = 0; k < 4; ++k) {
    acc += w.weight(static_cast<LocalityClass>(k));
    if (u < acc) {
      c.drawn = static_cast<LocalityClass>(k);
      break;
    }
  }
  // Round-off can leave u past the last positive weight.
  while (w.weight(c.drawn) == 0.0 && c.drawn != LocalityClass::kRandom)
    c.drawn = static_cast<LocalityClass>(static_cast<int>(c.drawn) - 1);
  LocalityClass use = c.drawn;
  if (class_size(use) == 0) {
    c.fell_back = true;
    use = LocalityClass::kRandom;
  }
  c.address = draw_from(classes_[static_cast<int>(use)], rng);
  return c;
}

const char* to_string(HostStatus s) {
  switch (s) {
    case HostStatus::kSusceptible: return "S";
    case HostStatus::kInfected: return "I";
    case HostStatus::kRecovered: return "R";
  }
  return "?";
}

InfectionTracker::InfectionTracker(std::size_t node_count, const std::vector<NodeId>& vulnerable)
    : states_(node_count), vulnerable_(node_count, 0) {
  for (NodeId v : vulnerable) {
    if (v >= node_count) throw std::out_of_range("InfectionTracker: vulnerable node out of range");
    vulnerable_[v] = 1;
  }
}

bool InfectionTracker::infect(NodeId n, NodeId infector, SimTime t) {
  auto& s = states_.at(n);
  if (!vulnerable_[n] || s.status != HostStatus::kSusceptible) return false;
  s.status = HostStatus::kInfected;
  s.infected_at = t;
  s.infector = infector;
  ++infected_;
  transitions_.push_back({t, n, HostStatus::kSusceptible, HostStatus::kInfected});
  return true;
}

void InfectionTracker::recover(NodeId n, SimTime t) {
  auto& s = states_.at(n);
  if (s.status != HostStatus::kInfected) throw std::logic_error("InfectionTracker::recover: host is not infected");
  s.status = HostStatus::kRecovered;
  s.recovered_at = t;
  --infected_;
  ++recovered_;
  transitions_.push_back({t, n, HostStatus::kInfected, HostStatus::kRecovered});
}

SimTime recovery_time(SimTime infected_at, double p, RngStream& rng) {
  if (p <= 0.0) return SimTime::max();
  const std::int64_t ms = 1'000'000;
  // First lattice point strictly after the infection instant.
  const std::int64_t first = (infected_at.ns() / ms + 1) * ms;
  const std::uint64_t k = rng.geometric(p);
  const std::int64_t limit = (SimTime::max().ns() - first) / ms;
  if (k - 1 > static_cast<std::uint64_t>(limit)) return SimTime::max();
  return SimTime::from_ns(first + static_cast<std::int64_t>(k - 1) * ms);
}

std::vector<NodeId> select_vulnerable(const Topology& topo, const VulnerableSelector& sel, std::uint64_t seed) {
  std::vector<NodeId> pool;
  for (const auto& n : topo.nodes) {
    if (!is_host(n.role)) continue;
    for (const auto& p : sel.pools) {
      if (p.matches(n)) {
        pool.push_back(n.id);
        break;
      }
    }
  }
  if (pool.size() < sel.count) {
    throw ConfigError("worm.vulnerable.count: " + std::to_string(sel.count) + " requested but the pools hold only " +
                      std::to_string(pool.size()) + " hosts");
  }
  // Partial Fisher-Yates.
  RngStream rng(seed, "worm.vulnerable");
  for (std::size_t i = 0; i < sel.count; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i, pool.size() - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(sel.count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

NodeId select_origin(const WormConfig& cfg, const std::vector<NodeId>& vulnerable, std::uint64_t seed,
                     std::uint32_t run) {
  if (!cfg.origins.empty()) {
    if (run >= cfg.origins.size()) {
      throw ConfigError("worm.origins: " + std::to_string(cfg.origins.size()) + " origins listed but run " +
                        std::to_string(run) + " requested");
    }
    const NodeId o = cfg.origins[run];
    if (!std::binary_search(vulnerable.begin(), vulnerable.end(), o)) {
      throw ConfigError("worm.origins: node " + std::to_string(o) + " is not in the vulnerable population");
    }
    return o;
  }
  if (run >= vulnerable.size()) {
    throw ConfigError("runs: more runs than vulnerable hosts to serve as distinct origins");
  }
  std::vector<NodeId> perm = vulnerable;
  RngStream rng(seed, "worm.origins");
  for (std::size_t i = 0; i <= run; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i, perm.size() - 1));
    std::swap(perm[i], perm[j]);
  }
  return perm[run];
}

void write_ground_truth(std::ostream& out, const std::vector<InfectionRecord>& records) {
  out << kGroundTruthHeader << '\n';
  for (const auto& r : records) {
    out << r.time.ns() << ',' << r.attacker.to_string() << ',' << r.victim.to_string() << ',' << to_string(r.transport)
        << ',' << r.flow_id << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  f.push_back(cur);
  return f;
}

template <typename T>
T parse_number(const std::string& s, const char* what, std::size_t line) {
  std::istringstream is(s);
  T v{};
  if (s.empty() || s[0] == '-' || s[0] == '+' || !(is >> v) || !is.eof()) {
    throw AnalysisError("ground truth line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<InfectionRecord> read_ground_truth(std::istream& in) {
  std::vector<InfectionRecord> out;
  std::string line;
  std::size_t no = 0;
  if (!std::getline(in, line)) throw AnalysisError("ground truth line 1: missing header");
  ++no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kGroundTruthHeader) throw AnalysisError("ground truth line 1: unexpected header '" + line + "'");
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 5) {
      throw AnalysisError("ground truth line " + std::to_string(no) + ": expected 5 fields, got " +
                          std::to_string(f.size()));
    }
    InfectionRecord r;
    r.time = SimTime::from_ns(parse_number<std::int64_t>(f[0], "time_ns", no));
    try {
      r.attacker = Ipv4::parse(f[1]);
      r.victim = Ipv4::parse(f[2]);
      r.transport = transport_from_string(f[3]);
    } catch (const std::exception& e) {
      throw AnalysisError("ground truth line " + std::to_string(no) + ": " + e.what());
    }
    if (r.transport == Transport::kIcmp) throw AnalysisError("ground truth line " + std::to_string(no) + ": bad transport");
    r.flow_id = parse_number<std::uint64_t>(f[4], "flow_id", no);
    out.push_back(r);
  }
  return out;
}

}  // namespace wormbench
