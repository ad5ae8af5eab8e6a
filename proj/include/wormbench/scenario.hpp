#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wormbench/topology.hpp"
#include "wormbench/traffic.hpp"
#include "wormbench/worm.hpp"

namespace wormbench {

struct TopologySpec {
  enum class Kind : std::uint8_t { kCategory1, kCategory2, kPfp, kFlat, kFile };
  Kind kind = Kind::kCategory1;

  // kPfp
  PfpParams pfp;
  AsLayout per_as;
  int link_category = 2;  // link parameter table used for PFP topologies
  // kFlat
  std::uint32_t flat_hosts = 50;
  LinkParam flat_access{100'000'000, SimTime::from_us(5)};
  // kFile
  std::filesystem::path file;

  TopologySpec();
};

const char* to_string(TopologySpec::Kind k);

// Builds the topology. Random structure (PFP graphs) is drawn from `seed`,
// so every run of a scenario shares one topology.
Topology build_topology(const TopologySpec& spec, std::uint64_t seed);

struct CaptureSpec {
  bool pcap = true;
  bool router_taps = false;
  bool full_checksums = false;
};

struct Scenario {
  std::string name = "scenario";
  std::optional<std::string> preset;  // preset the scenario was derived from
  TopologySpec topology;
  bool background = true;
  std::string mix_base = "category1";  // category1 | category2 | custom
  TrafficMix mix;
  std::optional<WormConfig> worm;
  std::vector<Ipv4> worm_origins;  // explicit origin per run (optional)
  SimTime duration = SimTime::from_s(300);
  SimTime warmup = SimTime::from_s(60);
  SimTime series_bin = SimTime::from_ms(10);
  std::uint32_t runs = 3;
  std::uint64_t seed = 1;
  CaptureSpec capture;
  std::filesystem::path output = "datasets";

  Scenario();
  // Throws ConfigError naming the field and the violated constraint.
  void validate() const;
  // Worm start time: the configured one, else the end of warm-up.
  SimTime worm_start() const;
};

// Strict JSON scenario format; unknown keys are errors. A "preset" key
// starts from that preset and the remaining keys override its fields.
Scenario scenario_from_json(const std::string& text, const std::filesystem::path& base_dir = {});
// Throws ConfigError if the file is missing or invalid.
Scenario parse_scenario(const std::filesystem::path& path);
// Canonical JSON (sorted keys, fully expanded mix); parses back to the same scenario.
std::string scenario_to_json(const Scenario& s, int indent = 2);

}  // namespace wormbench
