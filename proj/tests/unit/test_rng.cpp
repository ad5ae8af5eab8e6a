#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "wormbench/rng.hpp"

using namespace wormbench;

TEST_SUITE("rng") {
  TEST_CASE("splitmix64 matches the reference generator") {
    // Reference sequence of the splitmix64 generator seeded with 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
  }

  TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  }

  TEST_CASE("streams are deterministic and label-separated") {
    RngStream a(42, "x"), b(42, "x"), c(42, "y"), d(43, "x");
    std::vector<std::uint64_t> va, vb, vc, vd;
    for (int i = 0; i < 16; ++i) {
      va.push_back(a.next_u64());
      vb.push_back(b.next_u64());
      vc.push_back(c.next_u64());
      vd.push_back(d.next_u64());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
  }

  TEST_CASE("registry returns continuing streams") {
    RngRegistry r(7);
    const auto first = r.stream("s").next_u64();
    const auto second = r.stream("s").next_u64();
    RngStream fresh(7, "s");
    CHECK(fresh.next_u64() == first);
    CHECK(fresh.next_u64() == second);
  }

  TEST_CASE("mix_seed separates runs") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(mix_seed(1, k));
    CHECK(seen.size() == 1000);
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  }

  TEST_CASE("uniform variates stay in range and have the right mean") {
    RngStream r(1, "u");
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform01();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      const double v = r.uniform_open0();
      REQUIRE(v > 0.0);
      REQUIRE(v <= 1.0);
      sum += u;
    }
    // sd of the mean = sqrt(1/12/n)
    CHECK(std::abs(sum / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  }

  TEST_CASE("uniform_int covers the range evenly") {
    RngStream r(2, "i");
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) counts[r.uniform_int(3, 9) - 3]++;
    double chi2 = 0;
    for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi2 < 22.46);  // chi-square 6 dof, p = 0.001
    CHECK(r.uniform_int(5, 5) == 5);
    CHECK_THROWS(r.uniform_int(6, 5));
  }

  TEST_CASE("geometric draws have mean 1/p") {
    RngStream r(3, "g");
    for (double p : {0.5, 0.01, 1e-4}) {
      double sum = 0;
      const int n = 100000;
      for (int i = 0; i < n; ++i) {
        const auto k = r.geometric(p);
        REQUIRE(k >= 1);
        sum += static_cast<double>(k);
      }
      const double sd = std::sqrt((1 - p) / (p * p) / n);
      CAPTURE(p);
      CHECK(std::abs(sum / n - 1 / p) < 5 * sd);
    }
    CHECK(r.geometric(1.0) == 1);
    CHECK_THROWS(r.geometric(0.0));
  }

  TEST_CASE("exponential mean") {
    RngStream r(4, "e");
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += r.exponential(2.0);
    CHECK(std::abs(sum / n - 2.0) < 5 * 2.0 / std::sqrt(n));
  }
}
