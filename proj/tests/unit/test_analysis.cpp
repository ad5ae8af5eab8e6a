#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "wormbench/analysis.hpp"
#include "wormbench/errors.hpp"

using namespace wormbench;

namespace {

// Superposition of on/off sources with Pareto(alpha) period lengths; a
// source adds one unit per bin while on. Long-range dependent with
// H = (3 - alpha) / 2 in the limit.
std::vector<double> on_off(double alpha, std::size_t bins, int sources, std::uint64_t seed) {
  RngStream rng(seed, "onoff");
  std::vector<double> x(bins, 0.0);
  for (int s = 0; s < sources; ++s) {
    double t = -rng.uniform01() * 50.0;  // desynchronize the start
    bool on = rng.bernoulli(0.5);
    while (t < static_cast<double>(bins)) {
      const double len = draw_heavy_tailed(alpha, 1.0, rng);
      if (on) {
        const double a = std::max(t, 0.0), b = std::min(t + len, static_cast<double>(bins));
        for (double u = a; u < b;) {
          const auto i = static_cast<std::size_t>(u);
          const double next = std::min(b, static_cast<double>(i + 1));
          x[i] += next - u;
          u = next;
        }
      }
      t += len;
      on = !on;
    }
  }
  return x;
}

std::vector<std::uint32_t> ring(std::size_t n) { return std::vector<std::uint32_t>(n, 2); }

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("least squares recovers a line") {
    const auto f = least_squares({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(1));
    CHECK(f.r2 == doctest::Approx(1));
  }

  TEST_CASE("Hurst of independent noise is one half") {
    RngStream rng(1, "iid");
    std::vector<double> x(100000);
    for (auto& v : x) v = rng.uniform01();
    const auto h = estimate_hurst(x);
    CHECK(std::abs(h.h - 0.5) < 0.05);
    CHECK(h.meaningful());
    CHECK(h.method == "aggregated-variance");
  }

  TEST_CASE("Hurst of a linear trend approaches one") {
    std::vector<double> x(100000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i + 1);
    const auto h = estimate_hurst(x);
    CHECK(std::abs(h.h - 1.0) < 0.05);
  }

  TEST_CASE("Hurst of Pareto on/off superposition") {
    const auto x = on_off(1.4, 200000, 50, 3);
    const auto h = estimate_hurst(x);
    CHECK(std::abs(h.h - 0.8) < 0.07);
    CHECK(h.meaningful());
    // Shuffling destroys the dependence.
    auto y = x;
    RngStream rng(4, "shuffle");
    for (std::size_t i = y.size() - 1; i > 0; --i) std::swap(y[i], y[rng.uniform_int(0, i)]);
    CHECK(std::abs(estimate_hurst(y).h - 0.5) < 0.07);
  }

  TEST_CASE("Hurst grows with persistence") {
    double prev = 0;
    for (double alpha : {1.9, 1.6, 1.3}) {
      const double h = estimate_hurst(on_off(alpha, 100000, 40, 7)).h;
      CAPTURE(alpha);
      CHECK(h > prev);
      prev = h;
    }
  }

  TEST_CASE("Hurst preconditions") {
    CHECK_THROWS_AS(estimate_hurst(std::vector<double>(1000, 3.0)), AnalysisError);
    CHECK_THROWS_AS(estimate_hurst(std::vector<double>(50, 1.0)), AnalysisError);
    std::vector<double> x(100, 1.0);
    x[3] = 2;
    CHECK_THROWS_AS(estimate_hurst(x, {1, 2, 4}), AnalysisError);
    CHECK_THROWS_AS(estimate_hurst(x, {1, 2, 4, 16}), AnalysisError);
    CHECK(default_levels(1000) == std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64});
  }

  TEST_CASE("degree fit: star and ring are degenerate") {
    std::vector<std::uint32_t> star(100, 1);
    star[0] = 99;
    CHECK(degree_powerlaw_fit(star).degenerate);
    CHECK(degree_powerlaw_fit(ring(100)).degenerate);
    CHECK_THROWS_AS(degree_powerlaw_fit(ring(49)), AnalysisError);
  }

  TEST_CASE("degree fit recovers a Pareto tail exponent") {
    // Continuous Pareto(alpha) degrees have CCDF slope -alpha.
    RngStream rng(5, "deg");
    std::vector<std::uint32_t> d(20000);
    for (auto& v : d) v = static_cast<std::uint32_t>(std::floor(draw_heavy_tailed(1.5, 5.0, rng)));
    const auto f = degree_powerlaw_fit(d);
    CHECK_FALSE(f.degenerate);
    CHECK(f.r2 > 0.95);
    CHECK(std::abs(f.exponent - 1.5) < 0.25);
    CHECK(degree_powerlaw_fit(d, 20).min_degree == 20);
  }

  TEST_CASE("degree fit on PFP graphs") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      RngStream rng(seed, "pfp");
      const auto g = generate_pfp(PfpParams{}, rng);
      const auto f = degree_powerlaw_fit(g.degrees());
      CAPTURE(seed);
      CHECK(f.r2 >= 0.9);
      CHECK(f.exponent > 0.5);
    }
  }

  TEST_CASE("infection curve") {
    const auto empty = infection_curve({}, SimTime::from_s(60), SimTime::from_s(1), SimTime::from_s(70));
    CHECK(empty.values.size() == 11);
    for (double v : empty.values) CHECK(v == 1.0);

    const Ipv4 a = Ipv4::parse("10.0.0.1"), b = Ipv4::parse("10.0.0.2"), c = Ipv4::parse("10.0.0.3");
    std::vector<InfectionRecord> recs{{SimTime::from_ms(61500), a, b, Transport::kUdp, 1},
                                      {SimTime::from_ms(63000), b, c, Transport::kUdp, 2},
                                      {SimTime::from_ms(64000), a, c, Transport::kUdp, 3}};
    const auto cur = infection_curve(recs, SimTime::from_s(60), SimTime::from_s(1), SimTime::from_s(66));
    const std::vector<double> expect{1, 1, 2, 3, 3, 3, 3};
    CHECK(cur.values == expect);
    CHECK(std::is_sorted(cur.values.begin(), cur.values.end()));

    std::stringstream ss;
    write_ground_truth(ss, recs);
    CHECK(infection_curve(ss, SimTime::from_s(60), SimTime::from_s(1), SimTime::from_s(66)).values == expect);
    std::istringstream bad(std::string(kGroundTruthHeader) + "\n1,10.0.0.1,10.0.0.2,udp,1\nnope\n");
    try {
      infection_curve(bad, SimTime{}, SimTime::from_s(1), SimTime::from_s(2));
      FAIL("expected an error");
    } catch (const AnalysisError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  TEST_CASE("goodput arithmetic") {
    FlowRecord f;
    f.start = SimTime::from_s(2);
    f.end = SimTime::from_s(3);
    f.delivered_bytes = 1'000'000;
    f.completed = true;
    CHECK(f.goodput_bps() == doctest::Approx(8e6));
    const auto all = [](const FlowRecord&) { return true; };
    const auto s = goodput({f}, all, SimTime::from_ms(500), SimTime::from_s(4));
    REQUIRE(s.values.size() == 8);
    CHECK(s.values[3] == 0);
    CHECK(s.values[4] == doctest::Approx(8e6));
    CHECK(s.values[5] == doctest::Approx(8e6));
    CHECK(s.values[6] == 0);
    CHECK(*mean_flow_goodput({f}, all) == doctest::Approx(8e6));
    CHECK_FALSE(mean_flow_goodput({f}, [](const FlowRecord&) { return false; }));
    CHECK(goodput({f}, [](const FlowRecord&) { return false; }, SimTime::from_s(1), SimTime::from_s(4)).values ==
          std::vector<double>(4, 0.0));
  }

  TEST_CASE("simulated goodput never exceeds the access bandwidth") {
    const Topology t = build_category1();
    SimulationOptions opt;
    opt.duration = SimTime::from_s(10);
    opt.mix = TrafficMix::category1();
    Simulation sim(t, opt);
    const auto& r = sim.run();
    std::size_t n = 0;
    for (const auto& f : r.flows) {
      if (!f.completed || f.end <= f.start) continue;
      std::uint64_t cap = UINT64_MAX;
      for (auto li : sim.routing().path_links(f.client, f.server)) cap = std::min(cap, t.links[li].bandwidth_bps);
      CHECK(f.goodput_bps() <= static_cast<double>(cap));
      ++n;
    }
    CHECK(n > 50);
  }
}
