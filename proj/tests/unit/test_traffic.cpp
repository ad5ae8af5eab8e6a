#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "wormbench/errors.hpp"
#include "wormbench/traffic.hpp"

using namespace wormbench;

TEST_SUITE("traffic") {
  TEST_CASE("Pareto tail matches the survival function") {
    RngStream r(1, "pareto");
    const double alpha = 1.4, xmin = 2.0;
    const int n = 200000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = draw_heavy_tailed(alpha, xmin, r);
    for (double x : {2.0, 4.0, 10.0, 50.0}) {
      const double expect = std::pow(xmin / x, alpha);
      double hits = 0;
      for (double v : xs) hits += v > x;
      const double sd = std::sqrt(expect * (1 - expect) / n);
      CAPTURE(x);
      CHECK(std::abs(hits / n - expect) <= 5 * sd + 1e-12);
    }
    CHECK_THROWS_AS(draw_heavy_tailed(1.0, 1.0, r), std::invalid_argument);
    CHECK_THROWS_AS(draw_heavy_tailed(1.5, 0.0, r), std::invalid_argument);
  }

  TEST_CASE("distribution kinds") {
    RngStream r(2, "d");
    CHECK(Distribution::constant(3.5).draw(r) == 3.5);
    for (int i = 0; i < 1000; ++i) {
      const double u = Distribution::uniform(4e-3, 8e-3).draw(r);
      CHECK(u >= 4e-3);
      CHECK(u < 8e-3);
      const double k = Distribution::uniform_int(2, 4).draw(r);
      CHECK((k == 2 || k == 3 || k == 4));
      CHECK(Distribution::pareto(1.2, 10, 100).draw(r) <= 100);
    }
    CHECK_THROWS_AS(Distribution::uniform(2, 1).validate("x"), ConfigError);
    CHECK_THROWS_AS(Distribution::pareto(2.5, 1).validate("x"), ConfigError);
    CHECK_THROWS_AS(Distribution::exponential(-1).validate("x"), ConfigError);
    CHECK_NOTHROW(Distribution::pareto(1.4, 1).validate("x"));
  }

  TEST_CASE("category I mix shares") {
    const auto m = TrafficMix::category1();
    CHECK_NOTHROW(m.validate());
    const std::vector<std::pair<std::string, double>> table{{"HTTP", 0.5385}, {"HTTPS", 0.3813}, {"DNS", 0.0687},
                                                            {"SSH", 0.0078},  {"FTP", 0.0020},   {"mail", 0.0014},
                                                            {"ping", 0.0003}};
    CHECK(m.profiles.size() == table.size());
    for (const auto& [name, share] : table) {
      const auto* p = m.find(name);
      REQUIRE(p != nullptr);
      CHECK(std::abs(p->selection_probability - share) < 5e-5);
    }
    CHECK(m.find("Email") == m.find("mail"));
  }

  TEST_CASE("category II mix shares") {
    const auto m = TrafficMix::category2();
    CHECK_NOTHROW(m.validate());
    const std::vector<std::pair<std::string, double>> table{
        {"HTTPS", 0.492}, {"HTTP", 0.355}, {"DNS", 0.089}, {"FTP", 0.033}, {"mail", 0.028}};
    double listed = 0;
    for (const auto& [name, share] : table) {
      const auto* p = m.find(name);
      REQUIRE(p != nullptr);
      CHECK(std::abs(p->selection_probability - share) < 5e-5);
      listed += share;
    }
    REQUIRE(m.find("misc") != nullptr);
    CHECK(std::abs(m.find("misc")->selection_probability - (1 - listed)) < 1e-9);
  }

  TEST_CASE("mix validation") {
    auto m = TrafficMix::category1();
    m.profiles[0].selection_probability += 0.01;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    auto d = TrafficMix::category1();
    d.profiles[1].server_port = d.profiles[0].server_port;
    CHECK_THROWS_AS(d.validate(), ConfigError);
  }

  TEST_CASE("every built-in profile is valid with a distinct port") {
    std::set<std::uint16_t> ports;
    for (const auto& name : profile_names()) {
      for (int cat : {1, 2}) {
        const auto p = default_profile(name, cat);
        CHECK_NOTHROW(p.validate());
        if (cat == 1 && p.server_kind) CHECK(ports.insert(p.server_port).second);
      }
    }
    CHECK(profile_names().size() == 12);
    CHECK(canonical_profile_name("nameserver") == "DNS");
    CHECK_THROWS_AS(default_profile("gopher"), ConfigError);
  }

  TEST_CASE("profile selection frequencies") {
    const auto m = TrafficMix::category1();
    RngStream r(3, "sel");
    std::vector<double> counts(m.profiles.size(), 0);
    const int n = 400000;
    for (int i = 0; i < n; ++i) counts[select_profile(m, r)]++;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double p = m.profiles[i].selection_probability;
      CHECK(std::abs(counts[i] / n - p) <= 5 * std::sqrt(p * (1 - p) / n) + 1e-9);
    }
  }

  TEST_CASE("port allocator") {
    PortAllocator a;
    RngStream r(4, "ports");
    std::set<std::uint16_t> got;
    for (int i = 0; i < 16384; ++i) {
      const auto p = a.allocate(r);
      CHECK(p >= kEphemeralLow);
      got.insert(p);
    }
    CHECK(got.size() == 16384);
    CHECK(a.reuse_count() == 0);
    a.allocate(r);
    CHECK(a.reuse_count() == 1);
    a.release(50000);
    CHECK_FALSE(a.in_use(50000));
  }
}
