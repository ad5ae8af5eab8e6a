// Acceptance runner: one PASS/FAIL line per criterion, exit 0 only if all pass.
// Usage: wormbench_acceptance [criterion numbers...]

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wormbench/analysis.hpp"
#include "wormbench/dataset.hpp"
#include "wormbench/presets.hpp"
#include "wormbench/worm.hpp"

using namespace wormbench;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("wormbench_acc_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Collects mismatches; the first few end up in the detail string.
struct Mismatches {
  std::vector<std::string> items;
  std::size_t checked = 0;
  void expect(bool ok, const std::string& what) {
    ++checked;
    if (!ok) items.push_back(what);
  }
  Outcome outcome(const std::string& label) const {
    if (items.empty()) return {true, fmt("%zu %s checked", checked, label.c_str())};
    std::string d = fmt("%zu of %zu %s wrong:", items.size(), checked, label.c_str());
    for (std::size_t i = 0; i < std::min<std::size_t>(items.size(), 4); ++i) d += " [" + items[i] + "]";
    return {false, d};
  }
};

// ---------------------------------------------------------------- 1

struct PresetRow {
  const char* id;
  const char* worm;
  bool tcp;
  int connections;
  double lo_ms, hi_ms;
  char scan;  // 'u' uniform, 'a' class A/B preference, 's' subnet preference
  double recovery;
  unsigned vulnerable;
  std::vector<std::string> pools;
  int category;
};

const std::vector<PresetRow> kPresets{
    {"cat1-set1", "Slammer", false, 0, 4, 8, 'u', 1e-4, 30, {"server:HTTP", "server:HTTPS", "client"}, 1},
    {"cat1-set2", "Quasi Slammer", false, 0, 5, 10, 'a', 1e-4, 28, {"server:HTTP"}, 1},
    {"cat1-set3", "Quasi Slammer", false, 0, 5, 10, 's', 1e-4, 35, {"client"}, 1},
    {"cat1-set4", "Code Red I", true, 23, 0, 0, 'u', 1e-4, 28, {"server:HTTP"}, 1},
    {"cat1-set5", "Code Red II", true, 25, 0, 0, 'a', 1e-4, 28, {"server:HTTP"}, 1},
    {"cat1-set6", "Quasi Code Red II", true, 25, 0, 0, 's', 1e-4, 35, {"client"}, 1},
    {"cat2-set1", "Quasi Code Red II", true, 20, 0, 0, 's', 1e-5, 52, {"server:HTTP"}, 2},
    {"cat2-set2", "Quasi Slammer", false, 0, 10, 12, 's', 1e-5, 52, {"server:HTTP"}, 2},
};

struct LinkRow {
  LinkClass c;
  double gbps;
  double delay_us;
};

const std::vector<LinkRow> kCat1Links{{LinkClass::kCoreCore, 50, 3000},
                                      {LinkClass::kCoreGateway, 20, 2000},
                                      {LinkClass::kGatewayEdge, 10, 250},
                                      {LinkClass::kEdgeServer, 2.5, 5},
                                      {LinkClass::kEdgeClient, 0.1, 5}};
const std::vector<LinkRow> kCat2Links{{LinkClass::kCoreCore, 40, 4000},
                                      {LinkClass::kCoreGateway, 16, 2500},
                                      {LinkClass::kGatewayEdge, 8, 300},
                                      {LinkClass::kEdgeServer, 2, 10},
                                      {LinkClass::kEdgeClient, 0.08, 10}};

const std::vector<std::pair<const char*, double>> kCat1Mix{{"HTTP", 0.5385}, {"HTTPS", 0.3813}, {"DNS", 0.0687},
                                                           {"SSH", 0.0078},  {"FTP", 0.0020},   {"mail", 0.0014},
                                                           {"ping", 0.0003}};
const std::vector<std::pair<const char*, double>> kCat2Mix{
    {"HTTPS", 0.492}, {"HTTP", 0.355}, {"DNS", 0.089}, {"FTP", 0.033}, {"mail", 0.028}};

Outcome preset_fidelity() {
  Mismatches m;
  m.expect(preset_ids().size() == kPresets.size(), "preset count");
  for (const auto& r : kPresets) {
    const std::string id = r.id;
    const Scenario s = preset(id);
    if (!s.worm) {
      m.expect(false, id + " has no worm");
      continue;
    }
    const WormConfig& w = *s.worm;
    m.expect(w.name == r.worm, id + " name");
    m.expect(w.transport == (r.tcp ? Transport::kTcp : Transport::kUdp), id + " transport");
    if (r.tcp) {
      m.expect(w.concurrent_connections && *w.concurrent_connections == unsigned(r.connections), id + " connections");
      m.expect(!w.probe_interval, id + " probe interval on a TCP worm");
    } else {
      const bool ok = w.probe_interval && w.probe_interval->kind == Distribution::Kind::kUniform &&
                      std::abs(w.probe_interval->a * 1000 - r.lo_ms) < 1e-9 &&
                      std::abs(w.probe_interval->b * 1000 - r.hi_ms) < 1e-9;
      m.expect(ok, id + " probe interval");
      m.expect(!w.concurrent_connections, id + " connections on a UDP worm");
    }
    const auto& p = w.scanning.weights;
    switch (r.scan) {
      case 'u':
        m.expect(w.scanning.kind == Scanning::Kind::kUniformRandom, id + " scanning");
        break;
      case 'a':
        m.expect(w.scanning.kind == Scanning::Kind::kLocalPreference && p.random == 1.0 / 8 && p.same_a == 4.0 / 8 &&
                     p.same_b == 3.0 / 8 && p.same_subnet == 0,
                 id + " scanning");
        break;
      default:
        m.expect(w.scanning.kind == Scanning::Kind::kLocalPreference && p.random == 0.3 && p.same_a == 0 &&
                     p.same_b == 0 && p.same_subnet == 0.7,
                 id + " scanning");
    }
    m.expect(w.recovery_probability == r.recovery, id + " recovery");
    m.expect(w.vulnerable.count == r.vulnerable, id + " vulnerable count");
    std::vector<std::string> pools;
    for (const auto& x : w.vulnerable.pools) pools.push_back(x.to_string());
    m.expect(pools == r.pools, id + " pools");
    m.expect(s.topology.kind == (r.category == 1 ? TopologySpec::Kind::kCategory1 : TopologySpec::Kind::kCategory2),
             id + " topology");
    m.expect(s.runs == 3, id + " runs");
  }

  auto links = [&](const char* label, const LinkParams& lp, const std::vector<LinkRow>& rows, const Topology& t) {
    for (const auto& r : rows) {
      const std::uint64_t bps = std::llround(r.gbps * 1e9);
      const SimTime d = SimTime::from_ns(std::llround(r.delay_us * 1000));
      m.expect(lp.of(r.c).bandwidth_bps == bps && lp.of(r.c).delay == d,
               fmt("%s %s params", label, to_string(r.c)));
      for (const auto& l : t.links)
        if (l.link_class == r.c && (l.bandwidth_bps != bps || l.delay != d)) {
          m.expect(false, fmt("%s built %s link", label, to_string(r.c)));
          break;
        }
    }
  };
  RngStream rng(1, "topology");
  links("category I", LinkParams::category1(), kCat1Links, build_category1());
  links("category II", LinkParams::category2(), kCat2Links, build_category2(rng));

  auto mix = [&](const char* label, const TrafficMix& tm, const std::vector<std::pair<const char*, double>>& rows) {
    for (const auto& [name, prob] : rows) {
      const TrafficProfile* p = tm.find(name);
      m.expect(p && std::abs(p->selection_probability - prob) < 5e-5, fmt("%s %s share", label, name));
    }
  };
  mix("category I", TrafficMix::category1(), kCat1Mix);
  mix("category II", TrafficMix::category2(), kCat2Mix);
  return m.outcome("fields");
}

// ---------------------------------------------------------------- 2

Outcome topology_counts() {
  Mismatches m;
  const Topology a = build_category1();
  RngStream rng(1, "topology");
  const Topology b = build_category2(rng);
  auto check = [&](const char* label, const Topology& t, std::size_t core, std::size_t gw, std::size_t edge,
                   std::size_t hosts, std::size_t subnets) {
    m.expect(t.count(Role::kCore) == core, fmt("%s cores %zu", label, t.count(Role::kCore)));
    m.expect(t.count(Role::kGateway) == gw, fmt("%s gateways %zu", label, t.count(Role::kGateway)));
    m.expect(t.count(Role::kEdge) == edge, fmt("%s edges %zu", label, t.count(Role::kEdge)));
    m.expect(t.hosts().size() == hosts, fmt("%s hosts %zu", label, t.hosts().size()));
    m.expect(t.subnets.size() == subnets, fmt("%s subnets %zu", label, t.subnets.size()));
    m.expect(t.connected(), fmt("%s connected", label));
  };
  check("category I", a, 4, 8, 16, 200, 4);
  check("category II", b, 10, 20, 152, 1162, 10);
  return m.outcome("counts");
}

// ---------------------------------------------------------------- 3

// Independent CCDF fit over the upper degree decade [max/10, max].
std::pair<double, double> upper_decade_fit(const std::vector<std::uint32_t>& deg) {
  const std::uint32_t dmax = *std::max_element(deg.begin(), deg.end());
  const std::uint32_t lo = std::max<std::uint32_t>(1, dmax / 10);
  std::map<std::uint32_t, std::size_t> hist;
  for (auto d : deg) ++hist[d];
  std::vector<double> x, y;
  std::size_t above = deg.size();
  for (const auto& [d, c] : hist) {
    if (d >= lo) {
      x.push_back(std::log10(double(d)));
      y.push_back(std::log10(double(above) / double(deg.size())));
    }
    above -= c;
  }
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i], syy += y[i] * y[i];
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  return {-cov / vx, cov * cov / (vx * vy)};
}

Outcome power_law() {
  std::string d;
  bool pass = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream rng(seed, "pfp");
    const AsGraph g = generate_pfp(PfpParams{}, rng);
    const auto [slope, r2] = upper_decade_fit(g.degrees());
    // The library fit over the same range must agree.
    const auto deg = g.degrees();
    const PowerLawFit lib = degree_powerlaw_fit(deg, std::max<std::uint32_t>(1, *std::max_element(deg.begin(), deg.end()) / 10));
    pass = pass && r2 >= 0.9 && g.n == 1000 && std::abs(lib.r2 - r2) < 1e-9;
    d += fmt("%sseed %llu R2=%.3f slope=%.2f", seed > 1 ? ", " : "", (unsigned long long)seed, r2, slope);
  }
  return {pass, d};
}

// ---------------------------------------------------------------- 4

Outcome self_similarity() {
  Scenario s = preset("cat1-set1");
  s.worm.reset();
  s.duration = s.warmup + SimTime::from_s(300);
  const Topology t = build_topology(s.topology, s.seed);
  Simulation sim(t, plan_run(s, t, 0).options);
  const SimulationResult& r = sim.run();
  const std::size_t skip = static_cast<std::size_t>(s.warmup.ns() / r.series_bin.ns());
  std::vector<double> series(r.background_series.begin() + skip, r.background_series.end());
  const HurstEstimate h = estimate_hurst(series);
  std::vector<double> shuffled = series;
  std::mt19937 g(20240601u);
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  const HurstEstimate c = estimate_hurst(shuffled);
  const bool pass = h.h >= 0.6 && h.h <= 0.95 && h.r2 >= 0.9 && std::abs(c.h - 0.5) <= 0.07;
  return {pass, fmt("%zu bins: H=%.3f R2=%.3f; shuffled H=%.3f", series.size(), h.h, h.r2, c.h)};
}

// ---------------------------------------------------------------- 5

Outcome bandwidth_competition() {
  Scenario s = preset("cat1-set1");
  s.duration = SimTime::from_s(120);
  const Topology t = build_topology(s.topology, s.seed);
  std::vector<double> diff;
  std::size_t flows = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    s.seed = seed;
    const RunPlan p = plan_run(s, t, 0);
    Simulation on(t, p.options);
    const SimulationResult& ron = on.run();
    SimulationOptions off_opt = p.options;
    off_opt.worm.reset();
    Simulation off(t, off_opt);
    const SimulationResult& roff = off.run();

    // Flows started after the worm whose bottleneck link carried worm traffic.
    const SimTime start = s.worm_start();
    auto select = [&](const FlowRecord& f) {
      if (f.start < start) return false;
      const auto path = on.routing().path_links(f.client, f.server);
      std::uint64_t bw = UINT64_MAX;
      for (auto l : path) bw = std::min(bw, t.links[l].bandwidth_bps);
      for (auto l : path)
        if (t.links[l].bandwidth_bps == bw && ron.links[l].worm_bytes > 0) return true;
      return false;
    };
    const auto a = mean_flow_goodput(roff.flows, select);
    const auto b = mean_flow_goodput(ron.flows, select);
    if (!a || !b) return {false, fmt("seed %llu: no selected flows", (unsigned long long)seed)};
    for (const auto& f : ron.flows) flows += f.completed && select(f);
    diff.push_back(*a - *b);
  }
  const double n = double(diff.size());
  double mean = 0;
  for (double x : diff) mean += x;
  mean /= n;
  double var = 0;
  for (double x : diff) var += (x - mean) * (x - mean);
  var /= n - 1;
  const double tstat = var > 0 ? mean / std::sqrt(var / n) : 0.0;
  const double critical = 1.833;  // one-sided 95%, 9 degrees of freedom
  const auto positive = std::count_if(diff.begin(), diff.end(), [](double x) { return x > 0; });
  return {tstat > critical && mean > 0,
          fmt("10 pairs, %zu flows: mean drop %.4g bit/s, %lld/10 pairs lower, t=%.3f (need > %.3f)", flows, mean,
              static_cast<long long>(positive), tstat, critical)};
}

// ---------------------------------------------------------------- 6

constexpr std::uint32_t kFlatHosts = 50;
constexpr std::uint64_t kScanSpace = 65536;

// Packet-free SI model: each newly infected host probes immediately, then
// after U(4,8) ms gaps; targets uniform over the scan space minus itself.
std::vector<double> oracle_mean_curve(std::size_t reps, double bin_s, std::size_t bins) {
  std::vector<double> sum(bins, 0.0);
  std::mt19937 g(777u);
  std::uniform_real_distribution<double> gap(0.004, 0.008);
  std::uniform_int_distribution<std::uint64_t> target(0, kScanSpace - 2);
  const double horizon = bin_s * double(bins);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::vector<char> infected(kFlatHosts, 0);
    std::vector<double> when;
    using Ev = std::pair<double, std::uint32_t>;
    std::priority_queue<Ev, std::vector<Ev>, std::greater<>> q;
    infected[0] = 1;
    when.push_back(0.0);
    q.push({0.0, 0});
    while (!q.empty() && when.size() < kFlatHosts) {
      auto [t, h] = q.top();
      q.pop();
      if (t > horizon) break;
      // Index space without self: others occupy 0..N-2, the rest are empty.
      const std::uint64_t k = target(g);
      if (k < kFlatHosts - 1) {
        const std::uint32_t v = static_cast<std::uint32_t>(k < h ? k : k + 1);
        if (!infected[v]) {
          infected[v] = 1;
          when.push_back(t);
          q.push({t, v});
        }
      }
      q.push({t + gap(g), h});
    }
    std::sort(when.begin(), when.end());
    std::size_t j = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double at = bin_s * double(b);
      while (j < when.size() && when[j] <= at) ++j;
      sum[b] += double(j);
    }
  }
  for (auto& x : sum) x /= double(reps);
  return sum;
}

Scenario flat_worm_scenario(std::uint32_t hosts, double lo_s, double hi_s, double recovery, SimTime duration) {
  Scenario s;
  s.name = "flat";
  s.topology.kind = TopologySpec::Kind::kFlat;
  s.topology.flat_hosts = hosts;
  s.background = false;
  s.duration = duration;
  s.warmup = SimTime::from_ns(0);
  s.runs = 1;
  WormConfig w;
  w.name = "flat";
  w.transport = Transport::kUdp;
  w.probe_interval = Distribution::uniform(lo_s, hi_s);
  w.recovery_probability = recovery;
  w.vulnerable = {{HostPool::parse("client")}, hosts};
  s.worm = w;
  return s;
}

Outcome epidemic_oracle() {
  const double bin = 0.01;
  const std::size_t bins = 12000;  // 120 s
  const std::vector<double> oracle = oracle_mean_curve(4000, bin, bins);
  std::size_t half = 0;
  while (half < bins && oracle[half] < kFlatHosts / 2.0) ++half;
  if (half == bins) return {false, "oracle never reaches 50%"};
  const SimTime t50 = SimTime::from_ns(static_cast<std::int64_t>(half) * 10'000'000);

  Scenario s = flat_worm_scenario(kFlatHosts, 0.004, 0.008, 0.0, t50 + SimTime::from_s(1));
  s.worm->scan_range = {Cidr::parse("10.0.0.0/16")};
  const Topology t = build_topology(s.topology, 1);
  const int seeds = 30;
  double total = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    s.seed = static_cast<std::uint64_t>(seed);
    Simulation sim(t, plan_run(s, t, 0).options);
    const SimulationResult& r = sim.run();
    std::size_t n = 1;
    for (const auto& rec : r.infections) n += rec.time <= t50;
    total += double(n);
  }
  const double sim_mean = total / seeds;
  const double rel = std::abs(sim_mean - oracle[half]) / oracle[half];
  return {rel <= 0.10, fmt("at t50=%.2fs: simulated mean %.2f over %d seeds, oracle %.2f (%.1f%% apart)",
                           t50.seconds(), sim_mean, seeds, oracle[half], 100 * rel)};
}

// ---------------------------------------------------------------- 7

Outcome scanning_distribution() {
  RngStream topo_rng(1, "topology");
  const Topology t = build_category2(topo_rng);
  // Three /8s so class A and random differ; the host sits in the first.
  const AddressSet range({Cidr::parse("10.0.0.0/8"), Cidr::parse("11.0.0.0/8"), Cidr::parse("12.0.0.0/8")});
  const Node& host = t.nodes[t.hosts().front()];
  const Cidr subnet = t.subnets[host.subnet_id].prefix;
  const std::size_t n = 1'000'000;
  std::string d;
  bool pass = true;

  auto run = [&](const char* label, const LocalPreference& w, std::uint64_t seed) {
    Scanning sc;
    sc.kind = Scanning::Kind::kLocalPreference;
    sc.weights = w;
    const TargetChooser chooser(sc, range, host.address, subnet);
    RngStream rng(seed, "scan");
    std::size_t counts[kLocalityClassCount] = {0, 0, 0, 0};
    std::size_t outside = 0, self = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const TargetChoice c = chooser.choose(rng);
      ++counts[static_cast<int>(c.drawn)];
      self += c.address == host.address;
      bool in = range.contains(c.address) && !c.fell_back;
      switch (c.drawn) {
        case LocalityClass::kSameA: in = in && same_prefix(c.address, host.address, 8); break;
        case LocalityClass::kSameB: in = in && same_prefix(c.address, host.address, 16); break;
        case LocalityClass::kSameSubnet: in = in && subnet.contains(c.address); break;
        default: break;
      }
      outside += !in;
    }
    double worst = 0;
    for (std::size_t k = 0; k < kLocalityClassCount; ++k) {
      const double p = w.weight(static_cast<LocalityClass>(k));
      const double sigma = std::sqrt(double(n) * p * (1 - p));
      const double dev = std::abs(double(counts[k]) - double(n) * p);
      if (sigma == 0) {
        pass = pass && counts[k] == 0;
      } else {
        worst = std::max(worst, dev / sigma);
      }
    }
    pass = pass && worst <= 3.0 && outside == 0 && self == 0;
    d += fmt("%s%s worst %.2f sigma, %zu out of class", d.empty() ? "" : "; ", label, worst, outside);
  };
  run("class A/B 1/8-4/8-3/8", LocalPreference{0.125, 0.5, 0.375, 0.0}, 11);
  run("subnet 0.3/0.7", LocalPreference{0.3, 0.0, 0.0, 0.7}, 12);
  // The presets carry the same weights.
  pass = pass && preset("cat1-set5").worm->scanning.weights == LocalPreference{0.125, 0.5, 0.375, 0.0} &&
         preset("cat2-set2").worm->scanning.weights == LocalPreference{0.3, 0.0, 0.0, 0.7};
  return {pass, d};
}

// ---------------------------------------------------------------- 8

Outcome sir_invariants() {
  const std::uint32_t hosts = 2000;
  const double p = 0.01;
  std::string d;
  bool pass = true;

  // SI: the infected count never drops.
  {
    Scenario s = flat_worm_scenario(hosts, 0.0005, 0.001, 0.0, SimTime::from_s(2));
    const Topology t = build_topology(s.topology, 1);
    Simulation sim(t, plan_run(s, t, 0).options);
    const SimulationResult& r = sim.run();
    std::vector<StateTransition> tr = r.transitions;
    std::stable_sort(tr.begin(), tr.end(), [](auto& a, auto& b) { return a.time < b.time; });
    long infected = 0, drops = 0;
    for (const auto& x : tr) {
      const long before = infected;
      if (x.to == HostStatus::kInfected) ++infected;
      if (x.from == HostStatus::kInfected) --infected;
      drops += infected < before;
    }
    pass = pass && drops == 0 && infected > 1;
    d += fmt("SI: %ld infected, %ld decreases", infected, drops);
  }

  // SIR: no host leaves R; recovery delays are geometric on the ms lattice.
  Scenario s = flat_worm_scenario(hosts, 0.0005, 0.001, p, SimTime::from_s(10));
  const Topology t = build_topology(s.topology, 1);
  Simulation sim(t, plan_run(s, t, 0).options);
  const SimulationResult& r = sim.run();
  std::map<NodeId, std::vector<StateTransition>> by_node;
  for (const auto& x : r.transitions) by_node[x.node].push_back(x);
  std::size_t illegal = 0, censored = 0;
  std::vector<std::int64_t> delays;
  for (auto& [node, xs] : by_node) {
    std::stable_sort(xs.begin(), xs.end(), [](auto& a, auto& b) { return a.time < b.time; });
    HostStatus cur = HostStatus::kSusceptible;
    SimTime infected_at;
    for (const auto& x : xs) {
      const bool ok = x.from == cur && ((cur == HostStatus::kSusceptible && x.to == HostStatus::kInfected) ||
                                        (cur == HostStatus::kInfected && x.to == HostStatus::kRecovered));
      illegal += !ok;
      if (x.to == HostStatus::kInfected) infected_at = x.time;
      if (x.to == HostStatus::kRecovered) delays.push_back((x.time - infected_at).ns());
      cur = x.to;
    }
    censored += cur == HostStatus::kInfected;
  }
  std::size_t off_lattice = 0;
  for (auto ns : delays) off_lattice += ns % 1'000'000 != 0 || ns <= 0;
  double worst = 0;
  std::int64_t worst_t = 0;
  for (double q = 0.9; q > 0.05; q -= 0.1) {
    const auto tms = static_cast<std::int64_t>(std::floor(std::log(q) / std::log(1 - p)));
    const double expected = std::pow(1 - p, double(tms));
    const double observed =
        double(std::count_if(delays.begin(), delays.end(), [&](std::int64_t ns) { return ns > tms * 1'000'000; })) /
        double(delays.size());
    if (std::abs(observed - expected) > worst) worst = std::abs(observed - expected), worst_t = tms;
  }
  pass = pass && illegal == 0 && censored == 0 && off_lattice == 0 && delays.size() >= hosts && worst <= 0.02;
  d += fmt("; SIR: %zu recoveries, %zu illegal transitions, survival off by at most %.4f (t=%lld ms)", delays.size(),
           illegal, worst, static_cast<long long>(worst_t));
  return {pass, d};
}

// ---------------------------------------------------------------- 9, 10

// Minimal reader for classic little-endian microsecond pcap files.
struct RawRecord {
  std::int64_t us;
  std::string bytes;
};

bool read_raw_pcap(const fs::path& path, std::vector<RawRecord>& out, std::string& err) {
  const std::string b = slurp(path);
  auto u32 = [&](std::size_t o) {
    return std::uint32_t(std::uint8_t(b[o])) | std::uint32_t(std::uint8_t(b[o + 1])) << 8 |
           std::uint32_t(std::uint8_t(b[o + 2])) << 16 | std::uint32_t(std::uint8_t(b[o + 3])) << 24;
  };
  if (b.size() < 24 || u32(0) != 0xa1b2c3d4u) {
    err = path.filename().string() + ": bad global header";
    return false;
  }
  std::size_t o = 24;
  while (o < b.size()) {
    if (o + 16 > b.size()) {
      err = path.filename().string() + ": truncated record header";
      return false;
    }
    const std::uint32_t incl = u32(o + 8);
    if (o + 16 + incl > b.size()) {
      err = path.filename().string() + ": truncated record";
      return false;
    }
    out.push_back({std::int64_t(u32(o)) * 1'000'000 + u32(o + 4), b.substr(o + 16, incl)});
    o += 16 + incl;
  }
  return true;
}

std::uint32_t be32(const std::string& s, std::size_t o) {
  return std::uint32_t(std::uint8_t(s[o])) << 24 | std::uint32_t(std::uint8_t(s[o + 1])) << 16 |
         std::uint32_t(std::uint8_t(s[o + 2])) << 8 | std::uint8_t(s[o + 3]);
}
std::uint16_t be16(const std::string& s, std::size_t o) {
  return std::uint16_t(std::uint8_t(s[o]) << 8 | std::uint8_t(s[o + 1]));
}

struct GtRow {
  std::int64_t ns;
  std::string attacker, victim, transport;
  std::uint64_t flow;
};

std::vector<GtRow> read_gt(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<GtRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    GtRow r;
    std::string f;
    std::getline(ss, f, ',');
    r.ns = std::stoll(f);
    std::getline(ss, r.attacker, ',');
    std::getline(ss, r.victim, ',');
    std::getline(ss, r.transport, ',');
    std::getline(ss, f, ',');
    r.flow = std::stoull(f);
    rows.push_back(r);
  }
  return rows;
}

std::uint32_t ip_value(const std::string& dotted) {
  unsigned a, b, c, d;
  std::sscanf(dotted.c_str(), "%u.%u.%u.%u", &a, &b, &c, &d);
  return a << 24 | b << 16 | c << 8 | d;
}

// Every record's packet appears at the victim by the record time and at the
// attacker no later, with a prior SYN for TCP; records form one rooted tree.
std::string check_run_consistency(const fs::path& run, std::size_t& records) {
  const json m = json::parse(slurp(run / "manifest.json"));
  const std::string origin = m["worm"]["origin"];
  const auto rows = read_gt(run / "ground_truth.csv");
  records += rows.size();
  if (rows.empty()) return "no infections";

  std::map<std::string, std::vector<RawRecord>> cache;
  auto capture = [&](const std::string& ip) -> const std::vector<RawRecord>& {
    auto it = cache.find(ip);
    if (it != cache.end()) return it->second;
    std::vector<RawRecord> recs;
    std::string err;
    if (!read_raw_pcap(run / "hosts" / (ip + ".pcap"), recs, err)) throw std::runtime_error(err);
    return cache.emplace(ip, std::move(recs)).first->second;
  };

  std::map<std::string, std::int64_t> infected_at{{origin, m["worm"]["start_ns"].get<std::int64_t>()}};
  for (const auto& r : rows) {
    if (infected_at.count(r.victim)) return r.victim + " infected twice or is the origin";
    auto a = infected_at.find(r.attacker);
    if (a == infected_at.end() || a->second > r.ns) return r.attacker + " infects " + r.victim + " before being infected";
    infected_at[r.victim] = r.ns;

    const std::uint32_t src = ip_value(r.attacker), dst = ip_value(r.victim);
    const std::uint16_t id = static_cast<std::uint16_t>(r.flow & 0xffff);
    const auto match = [&](const RawRecord& x) {
      return x.bytes.size() >= 20 && be32(x.bytes, 12) == src && be32(x.bytes, 16) == dst && be16(x.bytes, 4) == id;
    };
    const RawRecord* at_victim = nullptr;
    for (const auto& x : capture(r.victim))
      if (match(x) && x.us * 1000 <= r.ns) at_victim = &x;
    if (!at_victim) return fmt("flow %llu missing from victim capture", (unsigned long long)r.flow);
    bool sent = false;
    for (const auto& x : capture(r.attacker)) sent = sent || (x.bytes == at_victim->bytes && x.us <= at_victim->us);
    if (!sent) return fmt("flow %llu missing from attacker capture", (unsigned long long)r.flow);
    if (r.transport == "tcp") {
      bool syn = false;
      for (const auto& x : capture(r.victim)) {
        if (x.us > at_victim->us) break;
        if (x.bytes.size() >= 40 && x.bytes[9] == 6 && be32(x.bytes, 12) == src && be32(x.bytes, 16) == dst) {
          const std::size_t ihl = (std::uint8_t(x.bytes[0]) & 0xf) * 4;
          syn = syn || (std::uint8_t(x.bytes[ihl + 13]) & 0x12) == 0x02;
        }
      }
      if (!syn) return fmt("flow %llu has no earlier SYN", (unsigned long long)r.flow);
    }
  }
  return "";
}

Outcome ground_truth_consistency() {
  TempDir tmp("gt");
  Scenario s = preset("cat1-set4");
  s.output = tmp.path;
  const DatasetOutput d = run_dataset(s);
  if (!d.ok()) return {false, "generation failed"};
  std::size_t records = 0;
  for (const auto& r : d.runs) {
    const std::string err = check_run_consistency(r.dir, records);
    if (!err.empty()) return {false, r.dir.filename().string() + ": " + err};
  }
  const ValidationReport rep = validate_dataset(d.dir);
  for (const auto& c : rep.checks)
    if ((c.name == "ground_truth_tree" || c.name == "ground_truth_pcap") && c.status != CheckStatus::kPass)
      return {false, "validator disagrees: " + c.run + " " + c.name + " " + c.detail};
  return {true, fmt("%zu runs, %zu infection records consistent; validator agrees", d.runs.size(), records)};
}

Outcome format_and_determinism() {
  TempDir a("det_a"), b("det_b");
  Scenario s = preset("cat1-set1");
  s.runs = 1;
  GenerateOverrides oa, ob;
  oa.out = a.path;
  ob.out = b.path;
  const DatasetOutput da = run_dataset(s, oa), db = run_dataset(s, ob);
  if (!da.ok() || !db.ok()) return {false, "generation failed"};
  const fs::path ra = da.runs[0].dir, rb = db.runs[0].dir;

  std::size_t files = 0, pcaps = 0, packets = 0;
  std::vector<std::string> diffs;
  for (const auto& e : fs::recursive_directory_iterator(ra)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), ra);
    ++files;
    if (rel == "manifest.json") {
      json ja = json::parse(slurp(e.path())), jb = json::parse(slurp(rb / rel));
      ja.erase("generated_at");
      jb.erase("generated_at");
      if (ja != jb) diffs.push_back(rel.string());
      continue;
    }
    if (slurp(e.path()) != slurp(rb / rel)) diffs.push_back(rel.string());
  }
  if (!diffs.empty()) return {false, fmt("%zu files differ, first %s", diffs.size(), diffs[0].c_str())};

  // Record counts from an independent reader against the manifest.
  const json m = json::parse(slurp(ra / "manifest.json"));
  for (const auto& f : m["files"]) {
    if (!f.contains("packets")) continue;
    std::vector<RawRecord> recs;
    std::string err;
    if (!read_raw_pcap(ra / f["path"].get<std::string>(), recs, err)) return {false, err};
    if (recs.size() != f["packets"].get<std::size_t>()) return {false, f["path"].get<std::string>() + " count mismatch"};
    ++pcaps;
    packets += recs.size();
  }

  // Third-party parser.
  const std::string cmd = std::string(WORMBENCH_PYTHON) + " " + WORMBENCH_SOURCE_DIR +
                          "/tools/pcap_reference_check.py '" + ra.string() + "' > /dev/null";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) return {false, fmt("reference parser (dpkt) rejected the run, exit status %d", rc)};
  return {true, fmt("%zu files identical across reruns; %zu pcaps, %zu records agree with dpkt and manifest", files,
                    pcaps, packets)};
}

// ---------------------------------------------------------------- 11

Outcome tcp_oracle() {
  doctest::Context ctx;
  ctx.setOption("test-suite", "tcp");
  ctx.setOption("no-run", false);
  ctx.setOption("minimal", true);
  const int rc = ctx.run();
  return {rc == 0, rc == 0 ? "hand-traced segment sequences and lossless transfers match" : "tcp suite failed"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "preset fidelity", preset_fidelity},
      {2, "topology counts", topology_counts},
      {3, "power-law degrees", power_law},
      {4, "self-similarity", self_similarity},
      {5, "bandwidth competition", bandwidth_competition},
      {6, "epidemic oracle", epidemic_oracle},
      {7, "scanning distribution", scanning_distribution},
      {8, "SI/SIR invariants", sir_invariants},
      {9, "ground truth vs pcap", ground_truth_consistency},
      {10, "format and determinism", format_and_determinism},
      {11, "TCP transport oracle", tcp_oracle},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %-24s %s (%.1fs)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
