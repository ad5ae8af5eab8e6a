#include "wormbench/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wormbench/errors.hpp"
#include "wormbench/presets.hpp"
#include "wormbench/topology_io.hpp"

namespace wormbench {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); }

// Object accessor that rejects keys outside the allowed set.
class Obj {
 public:
  Obj(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_.empty() ? "scenario" : path_, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!ok.count(k)) {
        std::string list;
        for (const auto& a : ok) list += (list.empty() ? "" : ", ") + a;
        fail(field(k), "unknown key (allowed: " + list + ")");
      }
    }
  }

  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }
  const json& at(const std::string& k) const { return j_.at(k); }

  double number(const std::string& k) const {
    const json& v = at(k);
    if (!v.is_number()) fail(field(k), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field(k), "must be finite");
    return x;
  }
  std::uint64_t uint(const std::string& k, std::uint64_t max = UINT64_MAX) const {
    const json& v = at(k);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(field(k), "expected a non-negative integer");
    }
    const auto x = v.get<std::uint64_t>();
    if (x > max) fail(field(k), "must be <= " + std::to_string(max));
    return x;
  }
  bool boolean(const std::string& k) const {
    if (!at(k).is_boolean()) fail(field(k), "expected true or false");
    return at(k).get<bool>();
  }
  std::string string(const std::string& k) const {
    if (!at(k).is_string()) fail(field(k), "expected a string");
    return at(k).get<std::string>();
  }
  SimTime seconds(const std::string& k) const {
    const double s = number(k);
    if (s < 0) fail(field(k), "must be >= 0");
    return SimTime::from_seconds(s);
  }

 private:
  const json& j_;
  std::string path_;
};

// ---- distributions --------------------------------------------------------

json dist_to_json(const Distribution& d) {
  using K = Distribution::Kind;
  switch (d.kind) {
    case K::kConstant: return {{"kind", "constant"}, {"value", d.a}};
    case K::kUniform: return {{"kind", "uniform"}, {"min", d.a}, {"max", d.b}};
    case K::kUniformInt: return {{"kind", "uniform_int"}, {"min", d.a}, {"max", d.b}};
    case K::kExponential: return {{"kind", "exponential"}, {"mean", d.a}};
    case K::kPareto: return {{"kind", "pareto"}, {"alpha", d.a}, {"x_min", d.b}, {"cap", d.cap}};
  }
  return {};
}

Distribution dist_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return Distribution::constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    fail(path, "expected a number or an object with a \"kind\"");
  }
  const std::string kind = j.at("kind").get<std::string>();
  Distribution d;
  if (kind == "constant") {
    Obj o(j, path, {"kind", "value"});
    d = Distribution::constant(o.number("value"));
  } else if (kind == "uniform" || kind == "uniform_int") {
    Obj o(j, path, {"kind", "min", "max"});
    d = kind == "uniform" ? Distribution::uniform(o.number("min"), o.number("max"))
                          : Distribution::uniform_int(o.number("min"), o.number("max"));
  } else if (kind == "exponential") {
    Obj o(j, path, {"kind", "mean"});
    d = Distribution::exponential(o.number("mean"));
  } else if (kind == "pareto") {
    Obj o(j, path, {"kind", "alpha", "x_min", "cap"});
    d = Distribution::pareto(o.number("alpha"), o.number("x_min"), o.has("cap") ? o.number("cap") : 0.0);
  } else {
    fail(path + ".kind", "unknown distribution '" + kind + "' (constant, uniform, uniform_int, exponential, pareto)");
  }
  d.validate(path);
  return d;
}

// ---- topology -------------------------------------------------------------

json topology_to_json(const TopologySpec& t) {
  json j{{"kind", to_string(t.kind)}};
  switch (t.kind) {
    case TopologySpec::Kind::kCategory1:
    case TopologySpec::Kind::kCategory2: break;
    case TopologySpec::Kind::kPfp: {
      json servers = json::object();
      for (const auto& [k, n] : t.per_as.mix.servers) servers[to_string(k)] = n;
      j["n_as"] = t.pfp.n_nodes;
      j["p"] = t.pfp.p;
      j["q"] = t.pfp.q;
      j["delta"] = t.pfp.delta;
      j["link_category"] = t.link_category;
      j["per_as"] = {{"cores", t.per_as.cores},
                     {"gateways", t.per_as.gateways},
                     {"edges", t.per_as.edges},
                     {"hosts", t.per_as.hosts},
                     {"subnets", t.per_as.subnets},
                     {"dual_homed_gateways", t.per_as.dual_homed_gateways},
                     {"servers", servers}};
      break;
    }
    case TopologySpec::Kind::kFlat:
      j["hosts"] = t.flat_hosts;
      j["bandwidth_bps"] = t.flat_access.bandwidth_bps;
      j["delay_s"] = t.flat_access.delay.seconds();
      break;
    case TopologySpec::Kind::kFile: j["path"] = t.file.string(); break;
  }
  return j;
}

TopologySpec topology_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) fail("topology.kind", "required string");
  const std::string kind = j.at("kind").get<std::string>();
  TopologySpec t;
  if (kind == "category1") {
    Obj o(j, "topology", {"kind"});
    t.kind = TopologySpec::Kind::kCategory1;
  } else if (kind == "category2") {
    Obj o(j, "topology", {"kind"});
    t.kind = TopologySpec::Kind::kCategory2;
  } else if (kind == "pfp") {
    Obj o(j, "topology", {"kind", "n_as", "p", "q", "delta", "link_category", "per_as"});
    t.kind = TopologySpec::Kind::kPfp;
    if (o.has("n_as")) t.pfp.n_nodes = static_cast<std::uint32_t>(o.uint("n_as", 1u << 20));
    if (o.has("p")) t.pfp.p = o.number("p");
    if (o.has("q")) t.pfp.q = o.number("q");
    if (o.has("delta")) t.pfp.delta = o.number("delta");
    if (o.has("link_category")) t.link_category = static_cast<int>(o.uint("link_category", 2));
    if (t.link_category != 1 && t.link_category != 2) fail("topology.link_category", "must be 1 or 2");
    if (o.has("per_as")) {
      Obj a(o.at("per_as"), "topology.per_as",
            {"cores", "gateways", "edges", "hosts", "subnets", "dual_homed_gateways", "servers"});
      const std::uint64_t lim = 1u << 16;
      if (a.has("cores")) t.per_as.cores = static_cast<std::uint32_t>(a.uint("cores", lim));
      if (a.has("gateways")) t.per_as.gateways = static_cast<std::uint32_t>(a.uint("gateways", lim));
      if (a.has("edges")) t.per_as.edges = static_cast<std::uint32_t>(a.uint("edges", lim));
      if (a.has("hosts")) t.per_as.hosts = static_cast<std::uint32_t>(a.uint("hosts", lim));
      if (a.has("subnets")) t.per_as.subnets = static_cast<std::uint32_t>(a.uint("subnets", 255));
      if (a.has("dual_homed_gateways")) t.per_as.dual_homed_gateways = a.boolean("dual_homed_gateways");
      if (a.has("servers")) {
        const json& s = a.at("servers");
        if (!s.is_object()) fail("topology.per_as.servers", "expected an object of kind -> count");
        t.per_as.mix.servers.clear();
        for (const auto& [k, v] : s.items()) {
          ServerKind kind_value;
          try {
            kind_value = server_kind_from_string(k);
          } catch (const ConfigError&) {
            fail("topology.per_as.servers." + k, "unknown server kind");
          }
          if (!v.is_number_unsigned()) fail("topology.per_as.servers." + k, "expected a non-negative integer");
          t.per_as.mix.servers.emplace_back(kind_value, v.get<std::uint32_t>());
        }
      }
    }
    t.pfp.validate();
  } else if (kind == "flat") {
    Obj o(j, "topology", {"kind", "hosts", "bandwidth_bps", "delay_s"});
    t.kind = TopologySpec::Kind::kFlat;
    if (o.has("hosts")) t.flat_hosts = static_cast<std::uint32_t>(o.uint("hosts", 65000));
    if (o.has("bandwidth_bps")) t.flat_access.bandwidth_bps = o.uint("bandwidth_bps");
    if (o.has("delay_s")) t.flat_access.delay = o.seconds("delay_s");
    if (t.flat_hosts == 0) fail("topology.hosts", "must be >= 1");
    if (t.flat_access.bandwidth_bps == 0) fail("topology.bandwidth_bps", "must be > 0");
  } else if (kind == "file") {
    Obj o(j, "topology", {"kind", "path"});
    t.kind = TopologySpec::Kind::kFile;
    if (!o.has("path")) fail("topology.path", "required for file topologies");
    t.file = o.string("path");
    if (t.file.is_relative() && !base_dir.empty()) t.file = base_dir / t.file;
  } else {
    fail("topology.kind", "unknown kind '" + kind + "' (category1, category2, pfp, flat, file)");
  }
  return t;
}

// ---- traffic --------------------------------------------------------------

json profile_to_json(const TrafficProfile& p) {
  return {{"transport", to_string(p.transport)},
          {"server_kind", p.server_kind ? json(to_string(*p.server_kind)) : json(nullptr)},
          {"server_port", p.server_port},
          {"request_length", dist_to_json(p.request_length)},
          {"reply_length", dist_to_json(p.reply_length)},
          {"requests_per_flow", dist_to_json(p.requests_per_flow)},
          {"time_between_requests", dist_to_json(p.time_between_requests)},
          {"replies_per_request", dist_to_json(p.replies_per_request)},
          {"time_to_respond", dist_to_json(p.time_to_respond)},
          {"time_between_flows", dist_to_json(p.time_between_flows)},
          {"selection_probability", p.selection_probability},
          {"wan_probability", p.wan_probability},
          {"upstream_probability", p.upstream_probability}};
}

void apply_profile(TrafficProfile& p, const json& j, const std::string& path) {
  Obj o(j, path,
        {"transport", "server_kind", "server_port", "request_length", "reply_length", "requests_per_flow",
         "time_between_requests", "replies_per_request", "time_to_respond", "time_between_flows",
         "selection_probability", "wan_probability", "upstream_probability"});
  if (o.has("transport")) {
    try {
      p.transport = transport_from_string(o.string("transport"));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail(o.field("transport"), "expected tcp, udp or icmp");
    }
  }
  if (o.has("server_kind")) {
    if (o.at("server_kind").is_null()) {
      p.server_kind.reset();
    } else {
      try {
        p.server_kind = server_kind_from_string(o.string("server_kind"));
      } catch (const ConfigError&) {
        fail(o.field("server_kind"), "unknown server kind");
      }
    }
  }
  if (o.has("server_port")) p.server_port = static_cast<std::uint16_t>(o.uint("server_port", 65535));
  const std::pair<const char*, Distribution*> dists[] = {
      {"request_length", &p.request_length},       {"reply_length", &p.reply_length},
      {"requests_per_flow", &p.requests_per_flow}, {"time_between_requests", &p.time_between_requests},
      {"replies_per_request", &p.replies_per_request}, {"time_to_respond", &p.time_to_respond},
      {"time_between_flows", &p.time_between_flows}};
  for (const auto& [k, d] : dists)
    if (o.has(k)) *d = dist_from_json(o.at(k), o.field(k));
  if (o.has("selection_probability")) p.selection_probability = o.number("selection_probability");
  if (o.has("wan_probability")) p.wan_probability = o.number("wan_probability");
  if (o.has("upstream_probability")) p.upstream_probability = o.number("upstream_probability");
}

void apply_traffic(Scenario& s, const json& j) {
  Obj o(j, "traffic", {"enabled", "mix", "profiles"});
  if (o.has("enabled")) s.background = o.boolean("enabled");
  if (o.has("mix")) {
    const std::string base = o.string("mix");
    if (base == "category1") {
      s.mix = TrafficMix::category1();
    } else if (base == "category2") {
      s.mix = TrafficMix::category2();
    } else if (base == "custom") {
      s.mix = TrafficMix{};
    } else {
      fail("traffic.mix", "unknown mix '" + base + "' (category1, category2, custom)");
    }
    s.mix_base = base;
  }
  if (o.has("profiles")) {
    const json& ps = o.at("profiles");
    if (!ps.is_object()) fail("traffic.profiles", "expected an object keyed by profile name");
    const int category = s.mix_base == "category2" ? 2 : 1;
    for (const auto& [raw, v] : ps.items()) {
      std::string name;
      try {
        name = canonical_profile_name(raw);
      } catch (const std::exception&) {
        fail("traffic.profiles." + raw, "undefined profile (known: HTTP, HTTPS, DNS, SSH, FTP, mail, ping, web, "
                                        "backup, interactive, streaming, misc)");
      }
      auto it = std::find_if(s.mix.profiles.begin(), s.mix.profiles.end(),
                             [&](const TrafficProfile& p) { return p.name == name; });
      if (it == s.mix.profiles.end()) {
        s.mix.profiles.push_back(default_profile(name, category));
        it = s.mix.profiles.end() - 1;
      }
      apply_profile(*it, v, "traffic.profiles." + raw);
    }
  }
}

// ---- worm -----------------------------------------------------------------

json worm_to_json(const WormConfig& w, const std::vector<Ipv4>& origins) {
  json j{{"name", w.name},
         {"transport", to_string(w.transport)},
         {"port", w.infection_port},
         {"payload_bytes", w.payload_length},
         {"recovery_per_ms", w.recovery_probability}};
  if (w.probe_interval) j["probe_interval"] = dist_to_json(*w.probe_interval);
  if (w.concurrent_connections) j["concurrent_connections"] = *w.concurrent_connections;
  if (w.scanning.kind == Scanning::Kind::kUniformRandom) {
    j["scanning"] = {{"kind", "uniform"}};
  } else {
    const auto& p = w.scanning.weights;
    j["scanning"] = {{"kind", "local_preference"},
                     {"random", p.random},
                     {"same_a", p.same_a},
                     {"same_b", p.same_b},
                     {"same_subnet", p.same_subnet}};
  }
  json range = json::array();
  for (const auto& c : w.scan_range) range.push_back(c.to_string());
  j["scan_range"] = range;
  json pools = json::array();
  for (const auto& p : w.vulnerable.pools) pools.push_back(p.to_string());
  j["vulnerable"] = {{"count", w.vulnerable.count}, {"pools", pools}};
  json orig = json::array();
  for (const auto& a : origins) orig.push_back(a.to_string());
  j["origins"] = orig;
  j["start_s"] = w.start ? json(w.start->seconds()) : json(nullptr);
  return j;
}

void apply_worm(WormConfig& w, std::vector<Ipv4>& origins, const json& j) {
  Obj o(j, "worm",
        {"name", "transport", "port", "payload_bytes", "probe_interval", "concurrent_connections", "scanning",
         "recovery_per_ms", "scan_range", "vulnerable", "origins", "start_s"});
  if (o.has("name")) w.name = o.string("name");
  if (o.has("transport")) {
    const std::string t = o.string("transport");
    if (t == "udp" || t == "UDP") {
      w.transport = Transport::kUdp;
    } else if (t == "tcp" || t == "TCP") {
      w.transport = Transport::kTcp;
    } else {
      fail("worm.transport", "expected tcp or udp");
    }
  }
  if (o.has("port")) w.infection_port = static_cast<std::uint16_t>(o.uint("port", 65535));
  if (o.has("payload_bytes")) w.payload_length = static_cast<std::uint32_t>(o.uint("payload_bytes", 1u << 30));
  if (o.has("probe_interval")) {
    if (o.at("probe_interval").is_null()) {
      w.probe_interval.reset();
    } else {
      w.probe_interval = dist_from_json(o.at("probe_interval"), "worm.probe_interval");
    }
  }
  if (o.has("concurrent_connections")) {
    if (o.at("concurrent_connections").is_null()) {
      w.concurrent_connections.reset();
    } else {
      w.concurrent_connections = static_cast<std::uint32_t>(o.uint("concurrent_connections", 100000));
    }
  }
  if (o.has("scanning")) {
    const json& sj = o.at("scanning");
    if (!sj.is_object() || !sj.contains("kind") || !sj.at("kind").is_string()) {
      fail("worm.scanning.kind", "required string");
    }
    const std::string kind = sj.at("kind").get<std::string>();
    if (kind == "uniform") {
      Obj so(sj, "worm.scanning", {"kind"});
      w.scanning = Scanning{};
    } else if (kind == "local_preference") {
      Obj so(sj, "worm.scanning", {"kind", "random", "same_a", "same_b", "same_subnet"});
      Scanning sc;
      sc.kind = Scanning::Kind::kLocalPreference;
      sc.weights = LocalPreference{0, 0, 0, 0};
      if (so.has("random")) sc.weights.random = so.number("random");
      if (so.has("same_a")) sc.weights.same_a = so.number("same_a");
      if (so.has("same_b")) sc.weights.same_b = so.number("same_b");
      if (so.has("same_subnet")) sc.weights.same_subnet = so.number("same_subnet");
      w.scanning = sc;
    } else {
      fail("worm.scanning.kind", "unknown strategy '" + kind + "' (uniform, local_preference)");
    }
  }
  if (o.has("recovery_per_ms")) w.recovery_probability = o.number("recovery_per_ms");
  if (o.has("scan_range")) {
    const json& r = o.at("scan_range");
    if (!r.is_array()) fail("worm.scan_range", "expected an array of CIDR strings");
    w.scan_range.clear();
    for (const auto& c : r) {
      if (!c.is_string()) fail("worm.scan_range", "expected CIDR strings");
      try {
        w.scan_range.push_back(Cidr::parse(c.get<std::string>()));
      } catch (const std::exception& e) {
        fail("worm.scan_range", e.what());
      }
    }
  }
  if (o.has("vulnerable")) {
    Obj v(o.at("vulnerable"), "worm.vulnerable", {"count", "pools"});
    if (v.has("count")) w.vulnerable.count = static_cast<std::uint32_t>(v.uint("count", 1u << 24));
    if (v.has("pools")) {
      const json& p = v.at("pools");
      if (!p.is_array()) fail("worm.vulnerable.pools", "expected an array");
      w.vulnerable.pools.clear();
      for (const auto& e : p) {
        if (!e.is_string()) fail("worm.vulnerable.pools", "expected strings");
        w.vulnerable.pools.push_back(HostPool::parse(e.get<std::string>()));
      }
    }
  }
  if (o.has("origins")) {
    const json& a = o.at("origins");
    if (!a.is_array()) fail("worm.origins", "expected an array of IPv4 addresses");
    origins.clear();
    for (const auto& e : a) {
      if (!e.is_string()) fail("worm.origins", "expected IPv4 strings");
      try {
        origins.push_back(Ipv4::parse(e.get<std::string>()));
      } catch (const std::exception& ex) {
        fail("worm.origins", ex.what());
      }
    }
  }
  if (o.has("start_s")) {
    if (o.at("start_s").is_null()) {
      w.start.reset();
    } else {
      w.start = o.seconds("start_s");
    }
  }
}

}  // namespace

TopologySpec::TopologySpec() {
  per_as.cores = 1;
  per_as.gateways = 1;
  per_as.edges = 1;
  per_as.hosts = 6;
  per_as.subnets = 1;
  per_as.mix.servers = {{ServerKind::kHttp, 1}, {ServerKind::kHttps, 1}, {ServerKind::kDns, 1}};
}

const char* to_string(TopologySpec::Kind k) {
  switch (k) {
    case TopologySpec::Kind::kCategory1: return "category1";
    case TopologySpec::Kind::kCategory2: return "category2";
    case TopologySpec::Kind::kPfp: return "pfp";
    case TopologySpec::Kind::kFlat: return "flat";
    case TopologySpec::Kind::kFile: return "file";
  }
  return "?";
}

Topology build_topology(const TopologySpec& spec, std::uint64_t seed) {
  RngStream rng(seed, "topology");
  switch (spec.kind) {
    case TopologySpec::Kind::kCategory1: return build_category1();
    case TopologySpec::Kind::kCategory2: return build_category2(rng);
    case TopologySpec::Kind::kPfp:
      spec.pfp.validate();
      return build_pfp_topology(spec.pfp, spec.per_as,
                                spec.link_category == 1 ? LinkParams::category1() : LinkParams::category2(), rng);
    case TopologySpec::Kind::kFlat: return build_flat(spec.flat_hosts, spec.flat_access);
    case TopologySpec::Kind::kFile: {
      if (!std::filesystem::exists(spec.file)) throw ConfigError("topology.path: no such file " + spec.file.string());
      return read_topology(spec.file);
    }
  }
  throw ConfigError("topology.kind: unsupported");
}

Scenario::Scenario() : mix(TrafficMix::category1()) {}

SimTime Scenario::worm_start() const { return worm && worm->start ? *worm->start : warmup; }

void Scenario::validate() const {
  if (name.empty()) fail("name", "must not be empty");
  if (name.find('/') != std::string::npos || name == "." || name == "..") fail("name", "must be a plain directory name");
  if (!(duration > SimTime{})) fail("duration_s", "must be > 0");
  if (!(duration > warmup)) {
    fail("duration_s", "must exceed warmup_s (" + duration.to_string() + " <= " + warmup.to_string() + ")");
  }
  if (!(series_bin > SimTime{})) fail("series_bin_ms", "must be > 0");
  if (runs < 1) fail("runs", "must be >= 1");
  if (background) mix.validate();
  if (worm) {
    worm->validate();
    if (worm_start() >= duration) fail("worm.start_s", "must be before the end of the run");
    if (!worm_origins.empty() && worm_origins.size() < runs) {
      fail("worm.origins", "lists " + std::to_string(worm_origins.size()) + " origins for " + std::to_string(runs) +
                               " runs");
    }
  } else if (!worm_origins.empty()) {
    fail("worm.origins", "given without a worm");
  }
  if (topology.kind == TopologySpec::Kind::kPfp) topology.pfp.validate();
}

Scenario scenario_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  Obj o(j, "",
        {"name", "preset", "topology", "traffic", "worm", "duration_s", "warmup_s", "series_bin_ms", "runs", "seed",
         "capture", "output"});
  Scenario s;
  if (o.has("preset")) {
    const std::string id = o.string("preset");
    try {
      s = preset(id);
    } catch (const ConfigError& e) {
      fail("preset", e.what());
    }
  }
  if (o.has("name")) s.name = o.string("name");
  if (o.has("topology")) s.topology = topology_from_json(o.at("topology"), base_dir);
  if (o.has("traffic")) apply_traffic(s, o.at("traffic"));
  if (o.has("worm")) {
    if (o.at("worm").is_null()) {
      s.worm.reset();
      s.worm_origins.clear();
    } else {
      if (!s.worm) s.worm = WormConfig{};
      apply_worm(*s.worm, s.worm_origins, o.at("worm"));
    }
  }
  if (o.has("duration_s")) s.duration = o.seconds("duration_s");
  if (o.has("warmup_s")) s.warmup = o.seconds("warmup_s");
  if (o.has("series_bin_ms")) s.series_bin = SimTime::from_seconds(o.number("series_bin_ms") / 1e3);
  if (o.has("runs")) s.runs = static_cast<std::uint32_t>(o.uint("runs", 1000));
  if (o.has("seed")) s.seed = o.uint("seed");
  if (o.has("capture")) {
    Obj c(o.at("capture"), "capture", {"pcap", "router_taps", "full_checksums"});
    if (c.has("pcap")) s.capture.pcap = c.boolean("pcap");
    if (c.has("router_taps")) s.capture.router_taps = c.boolean("router_taps");
    if (c.has("full_checksums")) s.capture.full_checksums = c.boolean("full_checksums");
  }
  if (o.has("output")) {
    s.output = o.string("output");
    if (s.output.is_relative() && !base_dir.empty()) s.output = base_dir / s.output;
  }
  s.validate();
  return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str(), path.parent_path());
}

std::string scenario_to_json(const Scenario& s, int indent) {
  json j;
  j["name"] = s.name;
  if (s.preset) j["preset"] = *s.preset;
  j["topology"] = topology_to_json(s.topology);
  json profiles = json::object();
  for (const auto& p : s.mix.profiles) profiles[p.name] = profile_to_json(p);
  j["traffic"] = {{"enabled", s.background}, {"mix", s.mix_base}, {"profiles", profiles}};
  j["worm"] = s.worm ? worm_to_json(*s.worm, s.worm_origins) : json(nullptr);
  j["duration_s"] = s.duration.seconds();
  j["warmup_s"] = s.warmup.seconds();
  j["series_bin_ms"] = s.series_bin.seconds() * 1e3;
  j["runs"] = s.runs;
  j["seed"] = s.seed;
  j["capture"] = {{"pcap", s.capture.pcap},
                  {"router_taps", s.capture.router_taps},
                  {"full_checksums", s.capture.full_checksums}};
  j["output"] = s.output.string();
  return j.dump(indent);
}

}  // namespace wormbench
