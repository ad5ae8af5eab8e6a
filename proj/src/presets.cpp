#include "wormbench/presets.hpp"

#include <cstdio>

#include "wormbench/errors.hpp"

namespace wormbench {

namespace {

constexpr std::uint16_t kSlammerPort = 1434;
constexpr std::uint32_t kSlammerPayload = 376;
constexpr std::uint16_t kCodeRedPort = 80;
constexpr std::uint32_t kCodeRedPayload = 4096;

LocalPreference class_ab() { return {1.0 / 8, 4.0 / 8, 3.0 / 8, 0.0}; }
LocalPreference subnet_pref() { return {0.3, 0.0, 0.0, 0.7}; }

WormConfig udp_worm(std::string name, double lo_ms, double hi_ms) {
  WormConfig w;
  w.name = std::move(name);
  w.transport = Transport::kUdp;
  w.infection_port = kSlammerPort;
  w.payload_length = kSlammerPayload;
  w.probe_interval = Distribution::uniform(lo_ms / 1e3, hi_ms / 1e3);
  return w;
}

WormConfig tcp_worm(std::string name, std::uint32_t connections) {
  WormConfig w;
  w.name = std::move(name);
  w.transport = Transport::kTcp;
  w.infection_port = kCodeRedPort;
  w.payload_length = kCodeRedPayload;
  w.concurrent_connections = connections;
  return w;
}

void local(WormConfig& w, LocalPreference p) {
  w.scanning.kind = Scanning::Kind::kLocalPreference;
  w.scanning.weights = p;
}

void pools(WormConfig& w, std::uint32_t count, std::vector<std::string> names) {
  w.vulnerable.count = count;
  for (const auto& n : names) w.vulnerable.pools.push_back(HostPool::parse(n));
}

Scenario base(const std::string& id, int category) {
  Scenario s;
  s.name = id;
  s.preset = id;
  s.topology.kind = category == 1 ? TopologySpec::Kind::kCategory1 : TopologySpec::Kind::kCategory2;
  s.mix_base = category == 1 ? "category1" : "category2";
  s.mix = category == 1 ? TrafficMix::category1() : TrafficMix::category2();
  s.duration = SimTime::from_s(300);
  s.warmup = SimTime::from_s(60);
  s.runs = 3;
  return s;
}

}  // namespace

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"cat1-set1", "cat1-set2", "cat1-set3", "cat1-set4",
                                            "cat1-set5", "cat1-set6", "cat2-set1", "cat2-set2"};
  return ids;
}

Scenario preset(std::string_view id) {
  const std::string k(id);
  WormConfig w;
  int category = 1;
  if (k == "cat1-set1") {
    w = udp_worm("Slammer", 4, 8);
    w.recovery_probability = 1e-4;
    pools(w, 30, {"server:HTTP", "server:HTTPS", "client"});
  } else if (k == "cat1-set2") {
    w = udp_worm("Quasi Slammer", 5, 10);
    local(w, class_ab());
    w.recovery_probability = 1e-4;
    pools(w, 28, {"server:HTTP"});
  } else if (k == "cat1-set3") {
    w = udp_worm("Quasi Slammer", 5, 10);
    local(w, subnet_pref());
    w.recovery_probability = 1e-4;
    pools(w, 35, {"client"});
  } else if (k == "cat1-set4") {
    w = tcp_worm("Code Red I", 23);
    w.recovery_probability = 1e-4;
    pools(w, 28, {"server:HTTP"});
  } else if (k == "cat1-set5") {
    w = tcp_worm("Code Red II", 25);
    local(w, class_ab());
    w.recovery_probability = 1e-4;
    pools(w, 28, {"server:HTTP"});
  } else if (k == "cat1-set6") {
    w = tcp_worm("Quasi Code Red II", 25);
    local(w, subnet_pref());
    w.recovery_probability = 1e-4;
    pools(w, 35, {"client"});
  } else if (k == "cat2-set1") {
    category = 2;
    w = tcp_worm("Quasi Code Red II", 20);
    local(w, subnet_pref());
    w.recovery_probability = 1e-5;
    pools(w, 52, {"server:HTTP"});
  } else if (k == "cat2-set2") {
    category = 2;
    w = udp_worm("Quasi Slammer", 10, 12);
    local(w, subnet_pref());
    w.recovery_probability = 1e-5;
    pools(w, 52, {"server:HTTP"});
  } else {
    std::string list;
    for (const auto& i : preset_ids()) list += (list.empty() ? "" : ", ") + i;
    throw ConfigError("unknown preset '" + k + "' (valid: " + list + ")");
  }
  Scenario s = base(k, category);
  s.worm = w;
  return s;
}

std::string preset_summary(std::string_view id) {
  const Scenario s = preset(id);
  const WormConfig& w = *s.worm;
  std::string timing;
  char buf[96];
  if (w.transport == Transport::kUdp) {
    std::snprintf(buf, sizeof buf, "probe U(%g,%g)ms", w.probe_interval->a * 1e3, w.probe_interval->b * 1e3);
  } else {
    std::snprintf(buf, sizeof buf, "%u connections", *w.concurrent_connections);
  }
  timing = buf;
  std::string scan = "uniform";
  if (w.scanning.kind == Scanning::Kind::kLocalPreference) {
    const auto& p = w.scanning.weights;
    std::snprintf(buf, sizeof buf, "local random=%g A=%g B=%g subnet=%g", p.random, p.same_a, p.same_b,
                  p.same_subnet);
    scan = buf;
  }
  std::string pool;
  for (const auto& p : w.vulnerable.pools) pool += (pool.empty() ? "" : "+") + p.to_string();
  std::snprintf(buf, sizeof buf, "recovery %g/ms, %u vulnerable ", w.recovery_probability, w.vulnerable.count);
  return std::string(id) + "  " + to_string(s.topology.kind) + "  " + w.name + " " + to_string(w.transport) + ", " +
         timing + ", " + scan + ", " + buf + pool;
}

}  // namespace wormbench
