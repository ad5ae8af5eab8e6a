#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wormbench/network.hpp"
#include "wormbench/scenario.hpp"

namespace wormbench {

struct GenerateOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint32_t> runs;
  std::optional<bool> router_taps;
  unsigned jobs = 1;  // runs executed concurrently
};

Scenario apply_overrides(Scenario s, const GenerateOverrides& o);

// Everything needed to execute run k of a scenario over its topology.
// Run k uses seed mix_seed(scenario.seed, k); the vulnerable set is drawn
// from the scenario seed and origin k is element k of a seeded permutation,
// so adding runs leaves earlier runs unchanged.
struct RunPlan {
  std::uint32_t index = 0;
  std::uint64_t run_seed = 0;
  SimulationOptions options;  // sink left null
};
RunPlan plan_run(const Scenario& s, const Topology& topo, std::uint32_t k);

struct RunOutput {
  std::uint32_t index = 0;
  std::uint64_t run_seed = 0;
  std::filesystem::path dir;
  std::string determinism_hash;
  std::size_t infections = 0;
  bool ok = false;
  std::string error;
};

struct DatasetOutput {
  std::filesystem::path dir;  // <out>/<scenario name>
  std::vector<RunOutput> runs;
  bool ok() const;
};

// Per run: run_<k>/hosts/<ip>.pcap, ground_truth.csv, manifest.json, plus
// topology.json, background_series.csv and flows.csv. A failed run still
// writes a manifest with status "failed".
DatasetOutput run_dataset(const Scenario& s, const GenerateOverrides& o = {});
RunOutput run_single(const Scenario& s, const Topology& topo, std::uint32_t k, const std::filesystem::path& run_dir);

// SHA-256 of the manifest with its wall-clock and hash fields removed.
std::string manifest_determinism_hash(const std::string& manifest_json);

enum class CheckStatus : std::uint8_t { kPass, kFail, kSkipped, kUnrunnable };
const char* to_string(CheckStatus s);

struct CheckResult {
  std::string run;  // run directory name, empty for dataset-level checks
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
};

struct ValidationReport {
  std::filesystem::path dir;
  std::vector<CheckResult> checks;
  // No check failed or was unrunnable.
  bool passed() const;
  const CheckResult* find(const std::string& run, const std::string& name) const;
  std::string to_json(int indent = 2) const;
};

struct ValidateOptions {
  double hurst_min = 0.6;
  double hurst_max = 0.95;
  double min_r2 = 0.9;
};

// Accepts a scenario directory (run_* subdirectories) or a single run directory.
ValidationReport validate_dataset(const std::filesystem::path& dir, const ValidateOptions& opt = {});

}  // namespace wormbench
