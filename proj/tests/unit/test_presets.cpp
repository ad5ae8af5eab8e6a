#include <string>
#include <vector>

#include "doctest.h"
#include "wormbench/errors.hpp"
#include "wormbench/presets.hpp"

using namespace wormbench;

namespace {

// Literal transcription of the published dataset table, one row per set.
struct Row {
  const char* id;
  const char* worm;
  const char* transport;
  int connections;         // TCP only, else 0
  double probe_lo_ms;      // UDP only
  double probe_hi_ms;
  const char* scanning;    // "uniform" | "ab" | "subnet"
  double recovery_per_ms;
  unsigned vulnerable;
  std::vector<std::string> pools;
  int category;
};

const std::vector<Row>& table() {
  static const std::vector<Row> rows{
      {"cat1-set1", "Slammer", "udp", 0, 4, 8, "uniform", 1e-4, 30, {"server:HTTP", "server:HTTPS", "client"}, 1},
      {"cat1-set2", "Quasi Slammer", "udp", 0, 5, 10, "ab", 1e-4, 28, {"server:HTTP"}, 1},
      {"cat1-set3", "Quasi Slammer", "udp", 0, 5, 10, "subnet", 1e-4, 35, {"client"}, 1},
      {"cat1-set4", "Code Red I", "tcp", 23, 0, 0, "uniform", 1e-4, 28, {"server:HTTP"}, 1},
      {"cat1-set5", "Code Red II", "tcp", 25, 0, 0, "ab", 1e-4, 28, {"server:HTTP"}, 1},
      {"cat1-set6", "Quasi Code Red II", "tcp", 25, 0, 0, "subnet", 1e-4, 35, {"client"}, 1},
      {"cat2-set1", "Quasi Code Red II", "tcp", 20, 0, 0, "subnet", 1e-5, 52, {"server:HTTP"}, 2},
      {"cat2-set2", "Quasi Slammer", "udp", 0, 10, 12, "subnet", 1e-5, 52, {"server:HTTP"}, 2},
  };
  return rows;
}

}  // namespace

TEST_SUITE("presets") {
  TEST_CASE("every preset matches its table row") {
    REQUIRE(preset_ids().size() == table().size());
    for (const Row& r : table()) {
      CAPTURE(r.id);
      const Scenario s = preset(r.id);
      REQUIRE(s.worm);
      const WormConfig& w = *s.worm;
      CHECK(w.name == r.worm);
      CHECK(std::string(to_string(w.transport)) == r.transport);
      if (r.connections) {
        REQUIRE(w.concurrent_connections);
        CHECK(*w.concurrent_connections == static_cast<unsigned>(r.connections));
        CHECK_FALSE(w.probe_interval);
        CHECK(w.infection_port == 80);
      } else {
        REQUIRE(w.probe_interval);
        CHECK(w.probe_interval->kind == Distribution::Kind::kUniform);
        CHECK(w.probe_interval->a == doctest::Approx(r.probe_lo_ms / 1000).epsilon(1e-12));
        CHECK(w.probe_interval->b == doctest::Approx(r.probe_hi_ms / 1000).epsilon(1e-12));
        CHECK_FALSE(w.concurrent_connections);
        CHECK(w.infection_port == 1434);
      }
      const std::string scan = r.scanning;
      if (scan == "uniform") {
        CHECK(w.scanning.kind == Scanning::Kind::kUniformRandom);
      } else {
        CHECK(w.scanning.kind == Scanning::Kind::kLocalPreference);
        const auto& p = w.scanning.weights;
        if (scan == "ab") {
          CHECK(p.random == 0.125);
          CHECK(p.same_a == 0.5);
          CHECK(p.same_b == 0.375);
          CHECK(p.same_subnet == 0.0);
        } else {
          CHECK(p.random == 0.3);
          CHECK(p.same_a == 0.0);
          CHECK(p.same_b == 0.0);
          CHECK(p.same_subnet == 0.7);
        }
      }
      CHECK(w.recovery_probability == r.recovery_per_ms);
      CHECK(w.vulnerable.count == r.vulnerable);
      std::vector<std::string> pools;
      for (const auto& p : w.vulnerable.pools) pools.push_back(p.to_string());
      CHECK(pools == r.pools);
      CHECK(s.topology.kind == (r.category == 1 ? TopologySpec::Kind::kCategory1 : TopologySpec::Kind::kCategory2));
      CHECK(s.mix_base == (r.category == 1 ? "category1" : "category2"));
      CHECK(s.runs == 3);
      CHECK_NOTHROW(s.validate());
    }
  }

  TEST_CASE("every preset's vulnerable pool exists in its topology") {
    for (const auto& id : preset_ids()) {
      const Scenario s = preset(id);
      const Topology t = build_topology(s.topology, s.seed);
      CAPTURE(id);
      CHECK(select_vulnerable(t, s.worm->vulnerable, s.seed).size() == s.worm->vulnerable.count);
    }
  }

  TEST_CASE("unknown id lists the valid ones") {
    try {
      preset("cat3-set1");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      for (const auto& id : preset_ids()) CHECK(msg.find(id) != std::string::npos);
    }
  }

  TEST_CASE("summaries mention the worm") {
    CHECK(preset_summary("cat1-set5").find("Code Red II") != std::string::npos);
    CHECK(preset_summary("cat2-set2").find("U(10,12)ms") != std::string::npos);
  }
}
