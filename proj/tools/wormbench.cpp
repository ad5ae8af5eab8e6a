// wormbench command line: generate, validate, topology, presets.
// Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wormbench/analysis.hpp"
#include "wormbench/dataset.hpp"
#include "wormbench/errors.hpp"
#include "wormbench/presets.hpp"
#include "wormbench/topology_io.hpp"

using namespace wormbench;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeFailure = 3;

struct GenerateArgs {
  std::string preset_id;
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::uint32_t> runs;
  bool router_taps = false;
  unsigned jobs = 1;
};

int cmd_generate(const GenerateArgs& a) {
  Scenario s = a.scenario_file.empty() ? preset(a.preset_id) : parse_scenario(a.scenario_file);
  GenerateOverrides o;
  o.seed = a.seed;
  if (a.out) o.out = *a.out;
  o.runs = a.runs;
  if (a.router_taps) o.router_taps = true;
  o.jobs = a.jobs;
  const DatasetOutput d = run_dataset(s, o);
  int rc = kOk;
  for (const auto& r : d.runs) {
    if (r.ok) {
      std::printf("%s  seed=%llu  infections=%zu  hash=%s\n", r.dir.string().c_str(),
                  static_cast<unsigned long long>(r.run_seed), r.infections, r.determinism_hash.c_str());
    } else {
      std::fprintf(stderr, "%s: run failed: %s\n", r.dir.string().c_str(), r.error.c_str());
      rc = kRuntimeFailure;
    }
  }
  return rc;
}

int cmd_validate(const std::string& dir, const std::string& report_path) {
  const ValidationReport rep = validate_dataset(dir);
  const std::string text = rep.to_json();
  if (report_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream(report_path) << text << '\n';
  }
  for (const auto& c : rep.checks) {
    std::fprintf(stderr, "%-8s %-10s %-18s %s\n", c.run.c_str(), to_string(c.status), c.name.c_str(),
                 c.detail.c_str());
  }
  return rep.passed() ? kOk : kValidationFailure;
}

struct TopologyArgs {
  bool cat1 = false, cat2 = false, pfp = false;
  PfpParams pfp_params{50, 0.3, 0.1, 0.048};
  std::uint32_t hosts_per_as = 6;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_topology(const TopologyArgs& a) {
  TopologySpec spec;
  if (a.cat1) {
    spec.kind = TopologySpec::Kind::kCategory1;
  } else if (a.cat2) {
    spec.kind = TopologySpec::Kind::kCategory2;
  } else {
    spec.kind = TopologySpec::Kind::kPfp;
    spec.pfp = a.pfp_params;
    spec.per_as.hosts = a.hosts_per_as;
  }
  const Topology t = build_topology(spec, a.seed);
  write_topology(t, a.out);
  std::printf("%s: %zu nodes (%zu core, %zu gateway, %zu edge, %zu hosts), %zu links, %u AS, %zu subnets\n",
              a.out.c_str(), t.nodes.size(), t.count(Role::kCore), t.count(Role::kGateway), t.count(Role::kEdge),
              t.hosts().size(), t.links.size(), t.as_count, t.subnets.size());
  if (t.as_count >= 50) {
    std::vector<std::uint32_t> deg(t.as_count, 0);
    for (auto [x, y] : t.as_links) ++deg[x], ++deg[y];
    const PowerLawFit f = degree_powerlaw_fit(deg);
    std::printf("AS degree CCDF fit: exponent %.3f, R2 %.3f over %zu degrees\n", f.exponent, f.r2, f.points);
  }
  return kOk;
}

int cmd_presets(bool list, const std::string& show) {
  if (!show.empty()) {
    std::cout << scenario_to_json(preset(show)) << '\n';
    return kOk;
  }
  (void)list;
  for (const auto& id : preset_ids()) std::cout << preset_summary(id) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wormbench: packet-level worm propagation dataset generator"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a dataset from a preset or scenario file");
  auto* g_preset = g->add_option("--preset", gen.preset_id, "Preset id (see `presets --list`)");
  auto* g_scn = g->add_option("--scenario", gen.scenario_file, "Scenario JSON file");
  g_preset->excludes(g_scn);
  g->add_option("--seed", gen.seed, "Scenario seed");
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--runs", gen.runs, "Number of runs (origins)")->check(CLI::PositiveNumber);
  g->add_flag("--router-taps", gen.router_taps, "Also capture at routers");
  g->add_option("--jobs", gen.jobs, "Runs executed concurrently")->check(CLI::PositiveNumber);

  std::string vdir, vreport;
  auto* v = app.add_subcommand("validate", "Validate a generated dataset");
  v->add_option("dir", vdir, "Scenario or run directory")->required();
  v->add_option("--report", vreport, "Write the JSON report here instead of stdout");

  TopologyArgs topo;
  auto* t = app.add_subcommand("topology", "Build a topology and write it as JSON");
  auto* f1 = t->add_flag("--category1", topo.cat1, "Category I enterprise network");
  auto* f2 = t->add_flag("--category2", topo.cat2, "Category II multi-AS network");
  auto* f3 = t->add_flag("--pfp", topo.pfp, "PFP-grown AS graph with one hierarchy per AS");
  f1->excludes(f2, f3);
  f2->excludes(f3);
  t->add_option("--n-as", topo.pfp_params.n_nodes, "PFP: number of ASs");
  t->add_option("--p", topo.pfp_params.p, "PFP: probability of the one-host, one-link step");
  t->add_option("--q", topo.pfp_params.q, "PFP: probability of the one-host, two-link step");
  t->add_option("--delta", topo.pfp_params.delta, "PFP: preference exponent");
  t->add_option("--hosts-per-as", topo.hosts_per_as, "PFP: hosts in each AS");
  t->add_option("--seed", topo.seed, "Random seed");
  t->add_option("--out", topo.out, "Output JSON file")->required();

  bool plist = false;
  std::string pshow;
  auto* p = app.add_subcommand("presets", "List the built-in presets");
  p->add_flag("--list", plist, "One line per preset");
  p->add_option("--show", pshow, "Print one preset as scenario JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (g->parsed()) {
      if (gen.preset_id.empty() && gen.scenario_file.empty()) {
        throw ConfigError("generate: one of --preset or --scenario is required");
      }
      return cmd_generate(gen);
    }
    if (v->parsed()) return cmd_validate(vdir, vreport);
    if (t->parsed()) {
      if (!topo.cat1 && !topo.cat2 && !topo.pfp) throw ConfigError("topology: one of --category1, --category2, --pfp");
      return cmd_topology(topo);
    }
    if (p->parsed()) return cmd_presets(plist, pshow);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kRuntimeFailure;
  }
  return kOk;
}
