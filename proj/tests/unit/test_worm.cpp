#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "wormbench/errors.hpp"
#include "wormbench/worm.hpp"

using namespace wormbench;

namespace {

Cidr cidr(const char* s) { return Cidr::parse(s); }
Ipv4 ip(const char* s) { return Ipv4::parse(s); }

WormConfig udp_worm() {
  WormConfig w;
  w.transport = Transport::kUdp;
  w.probe_interval = Distribution::uniform(0.004, 0.008);
  w.vulnerable = {{HostPool::parse("client")}, 5};
  return w;
}

}  // namespace

TEST_SUITE("worm") {
  TEST_CASE("address set merges nested blocks and indexes uniformly") {
    AddressSet s({cidr("10.0.1.0/24"), cidr("10.0.0.0/24"), cidr("10.0.1.128/25"), cidr("11.0.0.0/30")});
    CHECK(s.blocks().size() == 3);
    CHECK(s.size() == 256 + 256 + 4);
    CHECK(s.at(0) == ip("10.0.0.0"));
    CHECK(s.at(256) == ip("10.0.1.0"));
    CHECK(s.at(515) == ip("11.0.0.3"));
    CHECK_THROWS_AS(s.at(516), std::out_of_range);
    for (std::uint64_t i = 0; i < s.size(); ++i) REQUIRE(s.index_of(s.at(i)) == i);
    CHECK(s.contains(ip("10.0.1.200")));
    CHECK_FALSE(s.contains(ip("10.0.2.0")));
    CHECK_FALSE(s.contains(ip("11.0.0.4")));

    CHECK(s.intersect(cidr("10.0.0.0/8")).size() == 512);
    CHECK(s.intersect(cidr("11.0.0.0/8")).size() == 4);
    // A prefix narrower than a block yields the prefix itself.
    CHECK(s.intersect(cidr("10.0.1.64/26")).size() == 64);
    CHECK(s.intersect(cidr("12.0.0.0/8")).empty());
  }

  TEST_CASE("uniform chooser never picks itself and covers the range") {
    AddressSet range({cidr("10.0.0.0/29")});
    const Ipv4 self = ip("10.0.0.3");
    TargetChooser ch(Scanning{}, range, self, cidr("10.0.0.0/16"));
    CHECK(ch.class_size(LocalityClass::kRandom) == 7);
    RngStream rng(1, "t");
    std::map<std::uint32_t, int> seen;
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
      const auto c = ch.choose(rng);
      REQUIRE(c.address != self);
      REQUIRE(range.contains(c.address));
      seen[c.address.value]++;
    }
    CHECK(seen.size() == 7);
    // Chi-square, 6 dof: 99.9% point is 22.46.
    double chi = 0;
    for (auto& [a, k] : seen) chi += (k - n / 7.0) * (k - n / 7.0) / (n / 7.0);
    CHECK(chi < 22.46);
  }

  TEST_CASE("local preference draws classes with the configured weights") {
    // Two /8s, two /16s in the first, a subnet /24 for the scanner.
    AddressSet range({cidr("10.0.0.0/24"), cidr("10.0.1.0/24"), cidr("10.1.0.0/24"), cidr("11.0.0.0/24")});
    Scanning sc;
    sc.kind = Scanning::Kind::kLocalPreference;
    sc.weights = {0.125, 0.5, 0.375, 0.0};
    const Ipv4 self = ip("10.0.0.9");
    TargetChooser ch(sc, range, self, cidr("10.0.0.0/24"));
    CHECK(ch.class_size(LocalityClass::kRandom) == 1023);
    CHECK(ch.class_size(LocalityClass::kSameA) == 767);
    CHECK(ch.class_size(LocalityClass::kSameB) == 511);
    CHECK(ch.class_size(LocalityClass::kSameSubnet) == 255);

    RngStream rng(7, "t");
    const int n = 200000;
    int drawn[4] = {0, 0, 0, 0};
    int in_a = 0, in_b = 0;
    for (int i = 0; i < n; ++i) {
      const auto c = ch.choose(rng);
      REQUIRE(c.address != self);
      REQUIRE_FALSE(c.fell_back);
      drawn[static_cast<int>(c.drawn)]++;
      if (c.drawn == LocalityClass::kSameA) in_a += same_prefix(c.address, self, 8);
      if (c.drawn == LocalityClass::kSameB) in_b += same_prefix(c.address, self, 16);
    }
    CHECK(drawn[3] == 0);
    CHECK(in_a == drawn[1]);
    CHECK(in_b == drawn[2]);
    const double expect[4] = {0.125, 0.5, 0.375, 0.0};
    for (int k = 0; k < 3; ++k) {
      const double sd = std::sqrt(expect[k] * (1 - expect[k]) / n);
      CHECK(std::abs(drawn[k] / double(n) - expect[k]) < 5 * sd);
    }
    // Overall probability of hitting our own /16: same_b plus the share of
    // the random and /8 draws landing there.
    const double p16 = 0.375 + 0.5 * 511.0 / 767 + 0.125 * 511.0 / 1023;
    RngStream rng2(8, "t");
    int hit = 0;
    for (int i = 0; i < n; ++i) hit += same_prefix(ch.choose(rng2).address, self, 16);
    CHECK(std::abs(hit / double(n) - p16) < 5 * std::sqrt(p16 * (1 - p16) / n));
  }

  TEST_CASE("empty locality class falls back to random") {
    AddressSet range({cidr("11.0.0.0/24")});
    Scanning sc;
    sc.kind = Scanning::Kind::kLocalPreference;
    sc.weights = {0.3, 0.0, 0.0, 0.7};
    TargetChooser ch(sc, range, ip("10.0.0.1"), cidr("10.0.0.0/16"));
    CHECK(ch.class_size(LocalityClass::kSameSubnet) == 0);
    RngStream rng(3, "t");
    int fb = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto c = ch.choose(rng);
      REQUIRE(range.contains(c.address));
      fb += c.fell_back;
    }
    CHECK(fb > 6500);
    CHECK(fb < 7500);
  }

  TEST_CASE("a range holding only the scanner is rejected") {
    AddressSet range({cidr("10.0.0.1/32")});
    CHECK_THROWS_AS(TargetChooser(Scanning{}, range, ip("10.0.0.1"), cidr("10.0.0.0/16")), ConfigError);
  }

  TEST_CASE("tracker allows only S to I to R") {
    InfectionTracker t(5, {1, 3});
    CHECK_FALSE(t.infect(0, kNoNode, SimTime::from_ms(1)));  // not vulnerable
    CHECK(t.infect(1, kNoNode, SimTime::from_ms(1)));
    CHECK_FALSE(t.infect(1, 3, SimTime::from_ms(2)));  // already infected
    CHECK(t.infect(3, 1, SimTime::from_ms(3)));
    CHECK(t.infected() == 2);
    CHECK(t.state(3).infector == 1);
    t.recover(1, SimTime::from_ms(4));
    CHECK_FALSE(t.infect(1, 3, SimTime::from_ms(5)));  // recovered hosts stay immune
    CHECK_THROWS_AS(t.recover(1, SimTime::from_ms(6)), std::logic_error);
    CHECK_THROWS_AS(t.recover(0, SimTime::from_ms(6)), std::logic_error);
    CHECK(t.infected() == 1);
    CHECK(t.recovered() == 1);
    REQUIRE(t.transitions().size() == 3);
    for (const auto& tr : t.transitions()) {
      const bool ok = (tr.from == HostStatus::kSusceptible && tr.to == HostStatus::kInfected) ||
                      (tr.from == HostStatus::kInfected && tr.to == HostStatus::kRecovered);
      CHECK(ok);
    }
  }

  TEST_CASE("recovery lands on the millisecond lattice with geometric survival") {
    RngStream rng(11, "t");
    const double p = 1e-3;
    const SimTime t0 = SimTime::from_ns(2'500'000);  // 2.5 ms
    const int n = 50000;
    int survive = 0;
    for (int i = 0; i < n; ++i) {
      const SimTime r = recovery_time(t0, p, rng);
      REQUIRE(r.ns() % 1'000'000 == 0);
      REQUIRE(r >= SimTime::from_ms(3));
      // Survival past k checks is (1-p)^k.
      survive += r > SimTime::from_ms(2 + 1000);
    }
    const double expect = std::pow(1 - p, 1000);
    CHECK(std::abs(survive / double(n) - expect) < 5 * std::sqrt(expect * (1 - expect) / n));
    CHECK(recovery_time(t0, 0.0, rng) == SimTime::max());
  }

  TEST_CASE("vulnerable selection is a seeded sample of the pools") {
    const Topology t = build_category1();
    VulnerableSelector sel{{HostPool::parse("server:HTTP")}, 28};
    const auto a = select_vulnerable(t, sel, 5);
    CHECK(a == select_vulnerable(t, sel, 5));
    CHECK(a != select_vulnerable(t, sel, 6));
    CHECK(a.size() == 28);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::set<NodeId>(a.begin(), a.end()).size() == 28);
    for (NodeId n : a) CHECK(t.nodes[n].server_kind == ServerKind::kHttp);

    VulnerableSelector mixed{{HostPool::parse("server:HTTP"), HostPool::parse("server:HTTPS"), HostPool::parse("client")},
                             30};
    for (NodeId n : select_vulnerable(t, mixed, 1)) {
      const auto& node = t.nodes[n];
      CHECK((node.role == Role::kClient || node.server_kind == ServerKind::kHttp ||
             node.server_kind == ServerKind::kHttps));
    }
    CHECK_THROWS_AS(select_vulnerable(t, {{HostPool::parse("server:HTTP")}, 33}, 1), ConfigError);
  }

  TEST_CASE("vulnerable sampling is uniform over the pool union") {
    const Topology t = build_flat(10, LinkParam{100'000'000, SimTime::from_us(5)});
    std::map<NodeId, int> hits;
    const int n = 20000;
    for (int s = 0; s < n; ++s)
      for (NodeId v : select_vulnerable(t, {{HostPool::parse("client")}, 3}, static_cast<std::uint64_t>(s))) hits[v]++;
    CHECK(hits.size() == 10);
    for (auto& [node, k] : hits) CHECK(std::abs(k / double(n) - 0.3) < 0.02);
  }

  TEST_CASE("origins: distinct across runs, explicit ones validated") {
    WormConfig w = udp_worm();
    const std::vector<NodeId> vuln{2, 4, 6, 8, 10};
    std::set<NodeId> seen;
    for (std::uint32_t k = 0; k < 5; ++k) seen.insert(select_origin(w, vuln, 9, k));
    CHECK(seen.size() == 5);
    CHECK(select_origin(w, vuln, 9, 2) == select_origin(w, vuln, 9, 2));
    CHECK_THROWS_AS(select_origin(w, vuln, 9, 5), ConfigError);
    w.origins = {6, 3};
    CHECK(select_origin(w, vuln, 9, 0) == 6);
    CHECK_THROWS_AS(select_origin(w, vuln, 9, 1), ConfigError);
    CHECK_THROWS_AS(select_origin(w, vuln, 9, 2), ConfigError);
  }

  TEST_CASE("config validation names the field") {
    auto msg = [](const WormConfig& w) {
      try {
        w.validate();
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(msg(udp_worm()).empty());
    WormConfig w = udp_worm();
    w.scanning.kind = Scanning::Kind::kLocalPreference;
    w.scanning.weights = {0.3, 0.3, 0.3, 0.3};
    CHECK(msg(w).find("worm.scanning.weights") == 0);
    w = udp_worm();
    w.probe_interval.reset();
    CHECK(msg(w).find("worm.probe_interval") == 0);
    w = udp_worm();
    w.concurrent_connections = 5;
    CHECK(msg(w).find("worm.concurrent_connections") == 0);
    w = udp_worm();
    w.recovery_probability = 1.0;
    CHECK(msg(w).find("worm.recovery_probability") == 0);
    w = udp_worm();
    w.vulnerable.count = 0;
    CHECK(msg(w).find("worm.vulnerable.count") == 0);
    CHECK_THROWS_AS(HostPool::parse("router"), ConfigError);
    CHECK_THROWS_AS(HostPool::parse("client:HTTP"), ConfigError);
    CHECK(HostPool::parse("server:HTTP").to_string() == "server:HTTP");
  }

  TEST_CASE("populated blocks are the host /24s") {
    const auto c1 = populated_blocks(build_category1());
    CHECK(c1.size() == 4);
    for (const auto& b : c1) CHECK(b.length == 24);
    const auto flat = populated_blocks(build_flat(300, LinkParam{100'000'000, SimTime::from_us(5)}));
    CHECK(flat.size() == 2);
  }

  TEST_CASE("ground truth round trip and line-numbered errors") {
    std::vector<InfectionRecord> recs{
        {SimTime::from_ns(60'000'000'123), ip("10.0.0.5"), ip("10.1.0.7"), Transport::kUdp, 42},
        {SimTime::from_ns(61'000'000'000), ip("10.1.0.7"), ip("10.2.0.9"), Transport::kTcp, 0xffffffffffULL},
    };
    std::stringstream ss;
    write_ground_truth(ss, recs);
    const std::string text = ss.str();
    CHECK(text.rfind("time_ns,attacker_ip,victim_ip,transport,flow_id\n", 0) == 0);
    CHECK(text.find("60000000123,10.0.0.5,10.1.0.7,udp,42\n") != std::string::npos);
    std::istringstream in(text);
    CHECK(read_ground_truth(in) == recs);

    auto err = [](const std::string& body) {
      std::istringstream is(body);
      try {
        read_ground_truth(is);
      } catch (const AnalysisError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    const std::string h = std::string(kGroundTruthHeader) + "\n";
    CHECK(err("bogus\n").find("line 1") != std::string::npos);
    CHECK(err(h + "1,10.0.0.1,10.0.0.2,udp,1\n2,10.0.0.1,10.0.0.2,udp\n").find("line 3") != std::string::npos);
    CHECK(err(h + "x,10.0.0.1,10.0.0.2,udp,1\n").find("line 2") != std::string::npos);
    CHECK(err(h + "1,10.0.0.300,10.0.0.2,udp,1\n").find("line 2") != std::string::npos);
    CHECK(err(h + "1,10.0.0.1,10.0.0.2,icmp,1\n").find("line 2") != std::string::npos);
    CHECK(err(h + "-1,10.0.0.1,10.0.0.2,udp,1\n").find("line 2") != std::string::npos);
    CHECK(err(h).empty());
  }
}
