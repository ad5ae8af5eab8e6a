#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wormbench/analysis.hpp"
#include "wormbench/capture.hpp"
#include "wormbench/dataset.hpp"
#include "wormbench/errors.hpp"
#include "wormbench/presets.hpp"
#include "wormbench/topology_io.hpp"

namespace py = pybind11;
using namespace wormbench;

namespace {

py::dict run_to_dict(const RunOutput& r) {
  py::dict d;
  d["index"] = r.index;
  d["run_seed"] = r.run_seed;
  d["dir"] = r.dir.string();
  d["determinism_hash"] = r.determinism_hash;
  d["infections"] = r.infections;
  d["ok"] = r.ok;
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wormbench, m) {
  m.doc() = "Packet-level worm propagation dataset generator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RuntimeFailure>(m, "RuntimeFailure", PyExc_RuntimeError);
  py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_ValueError);

  m.def("preset_ids", &preset_ids);
  m.def("preset_json", [](const std::string& id) { return scenario_to_json(preset(id)); },
        "Preset as canonical scenario JSON");
  m.def("preset_summary", [](const std::string& id) { return preset_summary(id); });
  m.def("normalize_scenario", [](const std::string& text) { return scenario_to_json(scenario_from_json(text)); },
        "Parse, validate and re-emit a scenario in canonical form");

  m.def(
      "generate",
      [](const std::string& scenario_json, std::optional<std::string> out, std::optional<std::uint64_t> seed,
         std::optional<std::uint32_t> runs, bool router_taps, unsigned jobs) {
        const Scenario s = scenario_from_json(scenario_json);
        GenerateOverrides o;
        if (out) o.out = *out;
        o.seed = seed;
        o.runs = runs;
        if (router_taps) o.router_taps = true;
        o.jobs = jobs;
        DatasetOutput d;
        {
          py::gil_scoped_release release;
          d = run_dataset(s, o);
        }
        py::list runs_out;
        for (const auto& r : d.runs) runs_out.append(run_to_dict(r));
        return runs_out;
      },
      py::arg("scenario_json"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
      py::arg("runs") = py::none(), py::arg("router_taps") = false, py::arg("jobs") = 1);

  m.def(
      "validate",
      [](const std::string& dir) {
        ValidationReport r;
        {
          py::gil_scoped_release release;
          r = validate_dataset(dir);
        }
        return r.to_json();
      },
      py::arg("dir"), "Validation report as JSON text");

  m.def(
      "topology_json",
      [](const std::string& kind, std::uint64_t seed, std::uint32_t n_as, std::uint32_t hosts_per_as) {
        TopologySpec spec;
        if (kind == "category1") {
          spec.kind = TopologySpec::Kind::kCategory1;
        } else if (kind == "category2") {
          spec.kind = TopologySpec::Kind::kCategory2;
        } else if (kind == "pfp") {
          spec.kind = TopologySpec::Kind::kPfp;
          spec.pfp.n_nodes = n_as;
          spec.per_as.hosts = hosts_per_as;
        } else {
          throw ConfigError("topology kind must be category1, category2 or pfp");
        }
        return topology_to_json(build_topology(spec, seed));
      },
      py::arg("kind"), py::arg("seed") = 1, py::arg("n_as") = 50, py::arg("hosts_per_as") = 6);

  m.def(
      "pfp_degrees",
      [](std::uint32_t n, std::uint64_t seed, double p, double q, double delta) {
        PfpParams params{n, p, q, delta};
        params.validate();
        RngStream rng(seed, "pfp");
        return generate_pfp(params, rng).degrees();
      },
      py::arg("n"), py::arg("seed") = 1, py::arg("p") = 0.3, py::arg("q") = 0.1, py::arg("delta") = 0.048);

  m.def(
      "hurst",
      [](const std::vector<double>& series) {
        const HurstEstimate h = estimate_hurst(series);
        py::dict d;
        d["h"] = h.h;
        d["beta"] = h.beta;
        d["r2"] = h.r2;
        d["levels"] = h.levels;
        d["variances"] = h.variances;
        return d;
      },
      py::arg("series"), "Aggregated-variance Hurst estimate");

  m.def(
      "degree_fit",
      [](const std::vector<std::uint32_t>& degrees, std::optional<std::uint32_t> min_degree) {
        const PowerLawFit f = degree_powerlaw_fit(degrees, min_degree);
        py::dict d;
        d["exponent"] = f.exponent;
        d["r2"] = f.r2;
        d["min_degree"] = f.min_degree;
        d["points"] = f.points;
        d["degenerate"] = f.degenerate;
        return d;
      },
      py::arg("degrees"), py::arg("min_degree") = py::none());

  m.def(
      "read_pcap",
      [](const std::string& path) {
        const PcapFile f = read_pcap(path);
        py::list out;
        for (const auto& r : f.records) {
          out.append(py::make_tuple(r.micros(), py::bytes(reinterpret_cast<const char*>(r.data.data()), r.data.size())));
        }
        return out;
      },
      py::arg("path"), "List of (timestamp_us, datagram bytes)");

  m.def("mix_seed", &mix_seed, py::arg("seed"), py::arg("k"));
}
