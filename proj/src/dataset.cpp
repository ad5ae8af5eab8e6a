#include "wormbench/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "wormbench/analysis.hpp"
#include "wormbench/capture.hpp"
#include "wormbench/errors.hpp"
#include "wormbench/topology_io.hpp"

namespace wormbench {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kManifestFormat = "wormbench-run-manifest";

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw RuntimeFailure("cannot write " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw AnalysisError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scenario echo without the output location, so relocated reruns match.
json config_echo(const Scenario& s) {
  json j = json::parse(scenario_to_json(s));
  j.erase("output");
  return j;
}

void write_series(const fs::path& p, const SimulationResult& r) {
  std::ofstream out(p);
  out << "bin_start_ns,bytes\n";
  for (std::size_t i = 0; i < r.background_series.size(); ++i) {
    out << static_cast<std::int64_t>(i) * r.series_bin.ns() << ',' << r.background_series[i] << '\n';
  }
  if (!out) throw RuntimeFailure("cannot write " + p.string());
}

void write_flows(const fs::path& p, const SimulationResult& r, const Topology& topo) {
  std::ofstream out(p);
  out << "flow_id,client_ip,server_ip,profile,transport,start_ns,end_ns,planned_bytes,delivered_bytes,completed,"
         "failed\n";
  for (const auto& f : r.flows) {
    out << f.id << ',' << topo.nodes[f.client].address.to_string() << ','
        << topo.nodes[f.server].address.to_string() << ',' << f.profile << ',' << to_string(f.transport) << ','
        << f.start.ns() << ',';
    if (f.end != SimTime::max()) out << f.end.ns();
    out << ',' << f.planned_bytes << ',' << f.delivered_bytes << ',' << (f.completed ? 1 : 0) << ','
        << (f.failed ? 1 : 0) << '\n';
  }
  if (!out) throw RuntimeFailure("cannot write " + p.string());
}

json file_entry(const fs::path& run_dir, const fs::path& rel) {
  const fs::path p = run_dir / rel;
  return {{"path", rel.generic_string()}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}};
}

json statistics(const SimulationResult& r) {
  const auto& n = r.network;
  const auto& w = r.worm;
  std::uint64_t bg = 0;
  for (auto b : r.background_series) bg += b;
  std::size_t completed = 0;
  for (const auto& f : r.flows) completed += f.completed ? 1 : 0;
  return {{"packets_sent", n.packets_sent},
          {"packets_delivered", n.packets_delivered},
          {"queue_drops", n.queue_drops},
          {"unassigned_drops", n.unassigned_drops},
          {"unroutable_drops", n.unroutable_drops},
          {"rst_sent", n.rst_sent},
          {"udp_timeouts", n.udp_timeouts},
          {"port_reuses", n.port_reuses},
          {"events_processed", r.events_processed},
          {"background_bytes", bg},
          {"flows", r.flows.size()},
          {"flows_completed", completed},
          {"infections", r.infections.size()},
          {"final_infected", r.final_infected},
          {"final_recovered", r.final_recovered},
          {"worm_probes_sent", w.probes_sent},
          {"worm_connections_started", w.connections_started},
          {"worm_connections_completed", w.connections_completed},
          {"worm_connections_failed", w.connections_failed},
          {"worm_max_concurrent_connections", w.max_concurrent_connections}};
}

std::string hash_manifest(json m) {
  m.erase("generated_at");
  m.erase("determinism_hash");
  return sha256_hex(m.dump());
}

std::string run_dir_name(std::uint32_t k) { return "run_" + std::to_string(k); }

}  // namespace

Scenario apply_overrides(Scenario s, const GenerateOverrides& o) {
  if (o.seed) s.seed = *o.seed;
  if (o.out) s.output = *o.out;
  if (o.runs) s.runs = *o.runs;
  if (o.router_taps) s.capture.router_taps = *o.router_taps;
  s.validate();
  return s;
}

RunPlan plan_run(const Scenario& s, const Topology& topo, std::uint32_t k) {
  RunPlan p;
  p.index = k;
  p.run_seed = mix_seed(s.seed, k);
  SimulationOptions& o = p.options;
  o.seed = p.run_seed;
  o.duration = s.duration;
  o.background = s.background;
  o.mix = s.mix;
  o.router_taps = s.capture.router_taps;
  o.series_bin = s.series_bin;
  if (s.worm) {
    WormSetup ws;
    ws.config = *s.worm;
    ws.vulnerable = select_vulnerable(topo, ws.config.vulnerable, s.seed);
    if (!s.worm_origins.empty()) {
      std::unordered_map<std::uint32_t, NodeId> by_ip;
      for (const auto& n : topo.nodes) by_ip[n.address.value] = n.id;
      ws.config.origins.clear();
      for (const auto& a : s.worm_origins) {
        auto it = by_ip.find(a.value);
        if (it == by_ip.end()) throw ConfigError("worm.origins: " + a.to_string() + " is not in the topology");
        ws.config.origins.push_back(it->second);
      }
    }
    ws.origin = select_origin(ws.config, ws.vulnerable, s.seed, k);
    ws.start = s.worm_start();
    o.worm = ws;
  }
  return p;
}

bool DatasetOutput::ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunOutput& r) { return r.ok; });
}

std::string manifest_determinism_hash(const std::string& manifest_json) {
  return hash_manifest(json::parse(manifest_json));
}

RunOutput run_single(const Scenario& s, const Topology& topo, std::uint32_t k, const fs::path& run_dir) {
  RunOutput out;
  out.index = k;
  out.dir = run_dir;
  json m;
  m["format"] = kManifestFormat;
  m["version"] = 1;
  m["scenario"] = s.name;
  m["run"] = k;
  m["seed"] = s.seed;
  m["config"] = config_echo(s);

  std::vector<fs::path> files;
  std::vector<std::pair<fs::path, std::uint64_t>> pcaps;
  try {
    fs::remove_all(run_dir);
    fs::create_directories(run_dir);
    RunPlan plan = plan_run(s, topo, k);
    out.run_seed = plan.run_seed;
    m["run_seed"] = plan.run_seed;
    m["duration_ns"] = s.duration.ns();
    m["warmup_ns"] = s.warmup.ns();
    m["series_bin_ns"] = s.series_bin.ns();
    if (plan.options.worm) {
      const auto& ws = *plan.options.worm;
      json vul = json::array();
      for (auto n : ws.vulnerable) vul.push_back(topo.nodes[n].address.to_string());
      m["worm"] = {{"origin", topo.nodes[ws.origin].address.to_string()},
                   {"start_ns", ws.start.ns()},
                   {"transport", to_string(ws.config.transport)},
                   {"port", ws.config.infection_port},
                   {"vulnerable", vul}};
    } else {
      m["worm"] = nullptr;
    }

    write_topology(topo, run_dir / "topology.json");
    files.emplace_back("topology.json");

    std::unique_ptr<PcapCaptureSink> sink;
    if (s.capture.pcap) {
      sink = std::make_unique<PcapCaptureSink>(topo, run_dir / "hosts",
                                               SerializeOptions{plan.run_seed, s.capture.full_checksums});
      plan.options.sink = sink.get();
    }
    Simulation sim(topo, plan.options);
    const SimulationResult& r = sim.run();
    if (sink) {
      sink->close();
      for (const auto& n : topo.nodes) {
        pcaps.emplace_back(fs::path("hosts") / pcap_file_name(n), sink->writer(n.id).packet_count());
      }
    }
    {
      std::ofstream gt(run_dir / "ground_truth.csv");
      write_ground_truth(gt, r.infections);
      if (!gt) throw RuntimeFailure("cannot write ground_truth.csv");
    }
    files.emplace_back("ground_truth.csv");
    write_series(run_dir / "background_series.csv", r);
    files.emplace_back("background_series.csv");
    write_flows(run_dir / "flows.csv", r, topo);
    files.emplace_back("flows.csv");
    m["statistics"] = statistics(r);
    out.infections = r.infections.size();
    m["status"] = "complete";
    out.ok = true;
  } catch (const std::exception& e) {
    m["status"] = "failed";
    m["error"] = e.what();
    out.error = e.what();
  }

  json index = json::array();
  for (const auto& f : files) {
    if (fs::exists(run_dir / f)) index.push_back(file_entry(run_dir, f));
  }
  for (const auto& [f, count] : pcaps) {
    json e = file_entry(run_dir, f);
    e["packets"] = count;
    index.push_back(e);
  }
  std::sort(index.begin(), index.end(),
            [](const json& a, const json& b) { return a["path"].get<std::string>() < b["path"].get<std::string>(); });
  m["files"] = index;
  m["generated_at"] = utc_now();
  out.determinism_hash = hash_manifest(m);
  m["determinism_hash"] = out.determinism_hash;
  write_text(run_dir / "manifest.json", m.dump(2) + "\n");
  return out;
}

DatasetOutput run_dataset(const Scenario& scenario, const GenerateOverrides& o) {
  const Scenario s = apply_overrides(scenario, o);
  DatasetOutput d;
  d.dir = s.output / s.name;
  fs::create_directories(d.dir);
  const Topology topo = build_topology(s.topology, s.seed);
  topo.check_invariants();

  d.runs.resize(s.runs);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    for (std::uint32_t k; (k = next++) < s.runs;) d.runs[k] = run_single(s, topo, k, d.dir / run_dir_name(k));
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, s.runs));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  json idx;
  idx["scenario"] = config_echo(s);
  json runs = json::array();
  for (const auto& r : d.runs) {
    runs.push_back({{"dir", r.dir.filename().string()},
                    {"run_seed", r.run_seed},
                    {"status", r.ok ? "complete" : "failed"},
                    {"determinism_hash", r.determinism_hash}});
  }
  idx["runs"] = runs;
  write_text(d.dir / "dataset.json", idx.dump(2) + "\n");
  return d;
}

// ---- validation -----------------------------------------------------------

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kSkipped: return "skipped";
    case CheckStatus::kUnrunnable: return "unrunnable";
  }
  return "?";
}

bool ValidationReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.status == CheckStatus::kFail || c.status == CheckStatus::kUnrunnable;
  });
}

const CheckResult* ValidationReport::find(const std::string& run, const std::string& name) const {
  for (const auto& c : checks)
    if (c.run == run && c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::to_json(int indent) const {
  json j;
  j["dir"] = dir.string();
  j["passed"] = passed();
  json cs = json::array();
  for (const auto& c : checks) {
    json e{{"run", c.run}, {"check", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}};
    json m = json::object();
    for (const auto& [k, v] : c.metrics) m[k] = v;
    e["metrics"] = m;
    cs.push_back(e);
  }
  j["checks"] = cs;
  return j.dump(indent);
}

namespace {

class RunValidator {
 public:
  RunValidator(fs::path dir, std::string run, const ValidateOptions& opt, std::vector<CheckResult>& out)
      : dir_(std::move(dir)), run_(std::move(run)), opt_(opt), out_(out) {}

  void run_all() {
    if (!load_manifest()) {
      for (const char* c : {"determinism_hash", "file_integrity", "pcap_format", "hurst", "degree_fit",
                            "ground_truth_tree", "ground_truth_pcap"})
        add(c, CheckStatus::kUnrunnable, "manifest unavailable");
      return;
    }
    guarded("determinism_hash", [&] { check_hash(); });
    guarded("file_integrity", [&] { check_files(); });
    guarded("pcap_format", [&] { check_pcaps(); });
    guarded("hurst", [&] { check_hurst(); });
    guarded("degree_fit", [&] { check_degrees(); });
    const bool worm = manifest_.contains("worm") && !manifest_["worm"].is_null();
    if (!worm) {
      add("ground_truth_tree", CheckStatus::kSkipped, "scenario has no worm");
      add("ground_truth_pcap", CheckStatus::kSkipped, "scenario has no worm");
      return;
    }
    guarded("ground_truth_tree", [&] { check_tree(); });
    guarded("ground_truth_pcap", [&] { check_gt_pcap(); });
  }

 private:
  CheckResult& add(const std::string& name, CheckStatus st, std::string detail) {
    out_.push_back(CheckResult{run_, name, st, std::move(detail), {}});
    return out_.back();
  }

  template <typename F>
  void guarded(const std::string& name, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      add(name, CheckStatus::kUnrunnable, e.what());
    }
  }

  bool load_manifest() {
    const fs::path p = dir_ / "manifest.json";
    if (!fs::exists(p)) {
      add("manifest", CheckStatus::kUnrunnable, "manifest.json missing");
      return false;
    }
    try {
      manifest_text_ = read_text(p);
      manifest_ = json::parse(manifest_text_);
    } catch (const std::exception& e) {
      add("manifest", CheckStatus::kFail, std::string("unreadable manifest: ") + e.what());
      return false;
    }
    if (manifest_.value("format", "") != kManifestFormat) {
      add("manifest", CheckStatus::kFail, "not a run manifest");
      return false;
    }
    if (manifest_.value("status", "") != "complete") {
      add("manifest", CheckStatus::kFail, "run status is '" + manifest_.value("status", "?") + "': " +
                                              manifest_.value("error", ""));
      return false;
    }
    add("manifest", CheckStatus::kPass, "complete run");
    return true;
  }

  void check_hash() {
    const std::string recorded = manifest_.value("determinism_hash", "");
    const std::string actual = hash_manifest(manifest_);
    if (recorded == actual) {
      add("determinism_hash", CheckStatus::kPass, actual);
    } else {
      add("determinism_hash", CheckStatus::kFail, "recorded " + recorded + ", recomputed " + actual);
    }
  }

  void check_files() {
    std::size_t bad = 0, n = 0;
    std::string first;
    std::set<std::string> listed;
    for (const auto& f : manifest_.at("files")) {
      ++n;
      const std::string rel = f.at("path");
      listed.insert(rel);
      const fs::path p = dir_ / rel;
      std::string why;
      if (!fs::exists(p)) {
        why = "missing";
      } else if (fs::file_size(p) != f.at("bytes").get<std::uint64_t>()) {
        why = "size changed";
      } else if (sha256_file(p) != f.at("sha256").get<std::string>()) {
        why = "hash mismatch";
      }
      if (!why.empty() && bad++ == 0) first = rel + ": " + why;
    }
    if (fs::exists(dir_ / "hosts")) {
      for (const auto& e : fs::directory_iterator(dir_ / "hosts")) {
        const std::string rel = "hosts/" + e.path().filename().string();
        if (!listed.count(rel) && bad++ == 0) first = rel + ": not in the manifest";
      }
    }
    auto& c = add("file_integrity", bad ? CheckStatus::kFail : CheckStatus::kPass,
                  bad ? std::to_string(bad) + " bad file(s), first " + first : std::to_string(n) + " files verified");
    c.metrics = {{"files", static_cast<double>(n)}, {"bad", static_cast<double>(bad)}};
  }

  void check_pcaps() {
    std::size_t files = 0, bad = 0;
    std::uint64_t records = 0;
    std::string first;
    auto flag = [&](const std::string& why) {
      if (bad++ == 0) first = why;
    };
    for (const auto& f : manifest_.at("files")) {
      if (!f.contains("packets")) continue;
      ++files;
      const std::string rel = f.at("path");
      try {
        PcapReader rd(dir_ / rel);
        const auto& h = rd.header();
        if (h.version_major != kPcapVersionMajor || h.version_minor != kPcapVersionMinor ||
            h.snaplen != kPcapSnaplen || h.linktype != kLinktypeRawIpv4) {
          flag(rel + ": unexpected global header");
          continue;
        }
        PcapRecord r;
        std::int64_t last = -1;
        bool ok = true;
        while (rd.next(r)) {
          if (r.micros() < last) ok = false;
          last = r.micros();
          if (r.orig_len != r.data.size() || !parse_datagram(r.data).header_checksum_ok) ok = false;
        }
        records += rd.count();
        if (!ok) flag(rel + ": out-of-order timestamp or malformed datagram");
        if (rd.count() != f.at("packets").get<std::uint64_t>()) {
          flag(rel + ": " + std::to_string(rd.count()) + " records, manifest says " +
               std::to_string(f.at("packets").get<std::uint64_t>()));
        }
      } catch (const std::exception& e) {
        flag(rel + ": " + e.what());
      }
    }
    auto& c = add("pcap_format", bad ? CheckStatus::kFail : CheckStatus::kPass,
                  bad ? first : std::to_string(files) + " pcaps, " + std::to_string(records) + " records");
    c.metrics = {{"pcaps", static_cast<double>(files)}, {"records", static_cast<double>(records)}};
  }

  void check_hurst() {
    if (!manifest_["config"]["traffic"].value("enabled", true)) {
      add("hurst", CheckStatus::kSkipped, "background traffic disabled");
      return;
    }
    std::istringstream in(read_text(dir_ / "background_series.csv"));
    std::string line;
    std::getline(in, line);
    const std::int64_t warmup = manifest_.at("warmup_ns");
    std::vector<double> series;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw AnalysisError("background_series.csv: malformed row");
      if (std::stoll(line.substr(0, comma)) >= warmup) series.push_back(std::stod(line.substr(comma + 1)));
    }
    const HurstEstimate h = estimate_hurst(series);
    const bool ok = h.h >= opt_.hurst_min && h.h <= opt_.hurst_max && h.r2 >= opt_.min_r2;
    std::ostringstream os;
    os << "H=" << h.h << " R2=" << h.r2 << " over " << series.size() << " bins (accept H in [" << opt_.hurst_min
       << ", " << opt_.hurst_max << "], R2 >= " << opt_.min_r2 << ")";
    auto& c = add("hurst", ok ? CheckStatus::kPass : CheckStatus::kFail, os.str());
    c.metrics = {{"h", h.h}, {"r2", h.r2}, {"bins", static_cast<double>(series.size())}};
  }

  void check_degrees() {
    const Topology t = read_topology(dir_ / "topology.json");
    if (t.as_count < 50) {
      add("degree_fit", CheckStatus::kSkipped,
          "AS graph has " + std::to_string(t.as_count) + " nodes; a power-law fit needs at least 50");
      return;
    }
    std::vector<std::uint32_t> deg(t.as_count, 0);
    for (auto [a, b] : t.as_links) {
      ++deg[a];
      ++deg[b];
    }
    const PowerLawFit f = degree_powerlaw_fit(deg);
    const bool ok = !f.degenerate && f.r2 >= opt_.min_r2;
    std::ostringstream os;
    os << "exponent=" << f.exponent << " R2=" << f.r2 << " over " << f.points << " degrees >= " << f.min_degree;
    auto& c = add("degree_fit", ok ? CheckStatus::kPass : CheckStatus::kFail, os.str());
    c.metrics = {{"exponent", f.exponent}, {"r2", f.r2}};
  }

  std::vector<InfectionRecord> ground_truth() {
    std::ifstream in(dir_ / "ground_truth.csv");
    if (!in) throw AnalysisError("ground_truth.csv missing");
    return read_ground_truth(in);
  }

  void check_tree() {
    const auto recs = ground_truth();
    const Ipv4 origin = Ipv4::parse(manifest_["worm"].at("origin").get<std::string>());
    std::set<std::uint32_t> vulnerable;
    for (const auto& v : manifest_["worm"].at("vulnerable")) vulnerable.insert(Ipv4::parse(v.get<std::string>()).value);
    std::map<std::uint32_t, SimTime> infected{{origin.value, SimTime{}}};
    std::string why;
    SimTime prev;
    for (std::size_t i = 0; i < recs.size() && why.empty(); ++i) {
      const auto& r = recs[i];
      if (r.time < prev) why = "records not in time order at row " + std::to_string(i + 1);
      prev = r.time;
      auto att = infected.find(r.attacker.value);
      if (why.empty() && (att == infected.end() || att->second > r.time)) {
        why = "row " + std::to_string(i + 1) + ": attacker " + r.attacker.to_string() + " not infected yet";
      }
      if (why.empty() && infected.count(r.victim.value)) {
        why = "row " + std::to_string(i + 1) + ": victim " + r.victim.to_string() + " infected twice";
      }
      if (why.empty() && !vulnerable.count(r.victim.value)) {
        why = "row " + std::to_string(i + 1) + ": victim " + r.victim.to_string() + " is not vulnerable";
      }
      infected.emplace(r.victim.value, r.time);
    }
    auto& c = add("ground_truth_tree", why.empty() ? CheckStatus::kPass : CheckStatus::kFail,
                  why.empty() ? std::to_string(recs.size()) + " edges rooted at " + origin.to_string() : why);
    c.metrics = {{"edges", static_cast<double>(recs.size())}};
  }

  void check_gt_pcap() {
    const auto recs = ground_truth();
    if (!fs::exists(dir_ / "hosts")) {
      add("ground_truth_pcap", CheckStatus::kSkipped, "pcap capture disabled");
      return;
    }
    const bool tcp = manifest_["worm"].at("transport") == "tcp";
    const auto port = manifest_["worm"].at("port").get<std::uint16_t>();

    // Pass 1: the completing packet in each victim's file.
    struct Hit {
      std::int64_t t = -1;
      std::vector<std::uint8_t> bytes;
    };
    std::vector<Hit> victim_hit(recs.size()), attacker_hit(recs.size());
    std::vector<std::int64_t> syn_time(recs.size(), -1);
    std::map<std::uint32_t, std::vector<std::size_t>> by_victim, by_attacker;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      by_victim[recs[i].victim.value].push_back(i);
      by_attacker[recs[i].attacker.value].push_back(i);
    }
    auto file_of = [&](std::uint32_t ip) { return dir_ / "hosts" / (Ipv4(ip).to_string() + ".pcap"); };
    for (const auto& [ip, idx] : by_victim) {
      PcapReader rd(file_of(ip));
      PcapRecord r;
      while (rd.next(r)) {
        const auto v = parse_datagram(r.data);
        if (v.dst.value != ip) continue;
        for (auto i : idx) {
          const auto& g = recs[i];
          if (v.src == g.attacker && v.ip_id == static_cast<std::uint16_t>(g.flow_id & 0xffff) &&
              r.micros() <= g.time.ns() / 1000) {
            victim_hit[i] = {r.micros(), r.data};
          }
        }
      }
    }
    // Pass 2: the same bytes, no later, in the attacker's file (plus the SYN for TCP).
    for (const auto& [ip, idx] : by_attacker) {
      PcapReader rd(file_of(ip));
      PcapRecord r;
      while (rd.next(r)) {
        const auto v = parse_datagram(r.data);
        if (v.src.value != ip) continue;
        for (auto i : idx) {
          const auto& g = recs[i];
          if (v.dst != g.victim) continue;
          if (tcp && (v.tcp_flags & 0x02) && !(v.tcp_flags & 0x10) && v.dst_port == port &&
              r.micros() <= g.time.ns() / 1000) {
            syn_time[i] = r.micros();
          }
          if (attacker_hit[i].t < 0 && victim_hit[i].t >= 0 && r.micros() <= victim_hit[i].t &&
              r.data == victim_hit[i].bytes) {
            attacker_hit[i] = {r.micros(), {}};
          }
        }
      }
    }
    std::size_t bad = 0;
    std::string first;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      std::string why;
      if (victim_hit[i].t < 0) {
        why = "completing packet missing from the victim capture";
      } else if (attacker_hit[i].t < 0) {
        why = "completing packet missing from the attacker capture (or later than delivery)";
      } else if (tcp && (syn_time[i] < 0 || syn_time[i] > attacker_hit[i].t)) {
        why = "no SYN before the completing segment";
      }
      if (!why.empty() && bad++ == 0) first = "row " + std::to_string(i + 2) + " (" + recs[i].attacker.to_string() +
                                               " -> " + recs[i].victim.to_string() + "): " + why;
    }
    auto& c = add("ground_truth_pcap", bad ? CheckStatus::kFail : CheckStatus::kPass,
                  bad ? std::to_string(bad) + " record(s) inconsistent, first " + first
                      : std::to_string(recs.size()) + " infections found in both endpoint captures");
    c.metrics = {{"records", static_cast<double>(recs.size())}, {"bad", static_cast<double>(bad)}};
  }

  fs::path dir_;
  std::string run_;
  const ValidateOptions& opt_;
  std::vector<CheckResult>& out_;
  std::string manifest_text_;
  json manifest_;
};

}  // namespace

ValidationReport validate_dataset(const fs::path& dir, const ValidateOptions& opt) {
  ValidationReport rep;
  rep.dir = dir;
  if (!fs::is_directory(dir)) {
    rep.checks.push_back({"", "dataset", CheckStatus::kUnrunnable, "no such directory: " + dir.string(), {}});
    return rep;
  }
  if (fs::exists(dir / "manifest.json")) {
    RunValidator(dir, dir.filename().string(), opt, rep.checks).run_all();
    return rep;
  }
  std::vector<fs::path> runs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && e.path().filename().string().rfind("run_", 0) == 0) runs.push_back(e.path());
  }
  std::sort(runs.begin(), runs.end());
  if (runs.empty()) {
    rep.checks.push_back({"", "dataset", CheckStatus::kUnrunnable, "no manifest.json and no run_* directories", {}});
    return rep;
  }
  for (const auto& r : runs) RunValidator(r, r.filename().string(), opt, rep.checks).run_all();
  return rep;
}

}  // namespace wormbench
