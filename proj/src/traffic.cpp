#include "wormbench/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "wormbench/errors.hpp"

namespace wormbench {

double draw_heavy_tailed(double alpha, double x_min, RngStream& rng) {
  if (!(alpha > 1.0)) throw std::invalid_argument("draw_heavy_tailed: alpha must exceed 1");
  if (!(x_min > 0.0)) throw std::invalid_argument("draw_heavy_tailed: x_min must be positive");
  return x_min * std::pow(rng.uniform_open0(), -1.0 / alpha);
}

double Distribution::draw(RngStream& rng) const {
  switch (kind) {
    case Kind::kConstant: return a;
    case Kind::kUniform: return rng.uniform(a, b);
    case Kind::kUniformInt:
      return static_cast<double>(rng.uniform_int(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)));
    case Kind::kExponential: return rng.exponential(a);
    case Kind::kPareto: {
      const double v = draw_heavy_tailed(a, b, rng);
      return cap > 0.0 ? std::min(v, cap) : v;
    }
  }
  return a;
}

void Distribution::validate(const std::string& field) const {
  auto fail = [&](const std::string& why) { throw ConfigError(field + ": " + why); };
  switch (kind) {
    case Kind::kConstant:
      if (!(a >= 0.0)) fail("constant must be >= 0");
      break;
    case Kind::kUniform:
    case Kind::kUniformInt:
      if (!(a >= 0.0) || !(b >= a)) fail("uniform bounds must satisfy 0 <= min <= max");
      if (kind == Kind::kUniformInt && (a != std::floor(a) || b != std::floor(b))) fail("uniform_int bounds must be integers");
      break;
    case Kind::kExponential:
      if (!(a > 0.0)) fail("exponential mean must be > 0");
      break;
    case Kind::kPareto:
      if (!(a > 1.0 && a <= 2.0)) fail("pareto alpha must lie in (1, 2]");
      if (!(b > 0.0)) fail("pareto x_min must be > 0");
      if (cap != 0.0 && !(cap >= b)) fail("pareto cap must be >= x_min");
      break;
  }
}

const char* to_string(Transport t) {
  switch (t) {
    case Transport::kTcp: return "tcp";
    case Transport::kUdp: return "udp";
    case Transport::kIcmp: return "icmp";
  }
  return "?";
}

Transport transport_from_string(std::string_view s) {
  if (s == "tcp" || s == "TCP") return Transport::kTcp;
  if (s == "udp" || s == "UDP") return Transport::kUdp;
  if (s == "icmp" || s == "ICMP") return Transport::kIcmp;
  throw ConfigError("unknown transport '" + std::string(s) + "'");
}

void TrafficProfile::validate() const {
  const std::string p = "traffic.profiles." + name + ".";
  request_length.validate(p + "request_length");
  reply_length.validate(p + "reply_length");
  requests_per_flow.validate(p + "requests_per_flow");
  time_between_requests.validate(p + "time_between_requests");
  replies_per_request.validate(p + "replies_per_request");
  time_to_respond.validate(p + "time_to_respond");
  time_between_flows.validate(p + "time_between_flows");
  if (!time_between_flows.heavy_tailed()) throw ConfigError(p + "time_between_flows: must be a pareto distribution");
  if (!(selection_probability >= 0.0 && selection_probability <= 1.0)) throw ConfigError(p + "selection_probability: must lie in [0, 1]");
  if (!(wan_probability >= 0.0 && wan_probability <= 1.0)) throw ConfigError(p + "wan_probability: must lie in [0, 1]");
  if (!(upstream_probability >= 0.0 && upstream_probability <= 1.0)) throw ConfigError(p + "upstream_probability: must lie in [0, 1]");
  if (transport == Transport::kIcmp) {
    if (server_kind) throw ConfigError(p + "server_kind: ICMP profiles have no server");
  } else if (!server_kind || server_port == 0) {
    throw ConfigError(p + "server_port: TCP/UDP profiles need a server kind and port");
  }
  if (requests_per_flow.kind == Distribution::Kind::kConstant && requests_per_flow.a < 1.0) {
    throw ConfigError(p + "requests_per_flow: must be >= 1");
  }
}

const std::vector<std::string>& profile_names() {
  static const std::vector<std::string> names{"HTTP", "HTTPS", "DNS",    "SSH",         "FTP",       "mail",
                                              "ping", "web",   "backup", "interactive", "streaming", "misc"};
  return names;
}

std::string canonical_profile_name(std::string_view name) {
  if (name == "nameserver") return "DNS";
  if (name == "Email" || name == "email") return "mail";
  for (const auto& n : profile_names())
    if (n == name) return n;
  throw ConfigError("unknown traffic profile '" + std::string(name) + "'");
}

TrafficProfile default_profile(std::string_view raw_name, int category) {
  using D = Distribution;
  const std::string name = canonical_profile_name(raw_name);
  // Category II uses slightly longer and heavier-tailed think times.
  const D between_flows = category == 2 ? D::pareto(1.5, 2.0) : D::pareto(1.4, 1.5);
  const double wan = category == 2 ? 0.3 : 0.0;

  TrafficProfile p;
  p.name = name;
  p.time_between_flows = between_flows;
  p.wan_probability = wan;
  p.replies_per_request = D::constant(1);
  p.time_to_respond = D::uniform(0.001, 0.01);
  p.time_between_requests = D::uniform(0.05, 0.5);
  p.requests_per_flow = D::uniform_int(1, 5);

  auto tcp_server = [&](ServerKind k) {
    p.transport = Transport::kTcp;
    p.server_kind = k;
    p.server_port = server_port(k);
  };
  auto udp_server = [&](ServerKind k) {
    p.transport = Transport::kUdp;
    p.server_kind = k;
    p.server_port = server_port(k);
  };

  if (name == "HTTP" || name == "web") {
    tcp_server(name == "HTTP" ? ServerKind::kHttp : ServerKind::kWeb);
    p.request_length = D::uniform(300, 800);
    p.reply_length = D::pareto(1.3, 2048, 1e7);
    p.requests_per_flow = D::uniform_int(1, 10);
  } else if (name == "HTTPS") {
    tcp_server(ServerKind::kHttps);
    p.request_length = D::uniform(400, 1200);
    p.reply_length = D::pareto(1.3, 1500, 1e7);
    p.requests_per_flow = D::uniform_int(1, 6);
  } else if (name == "DNS") {
    udp_server(ServerKind::kDns);
    p.request_length = D::uniform(50, 70);
    p.reply_length = D::uniform(100, 140);
    p.requests_per_flow = D::constant(1);
    p.time_to_respond = D::uniform(0.0005, 0.002);
    p.upstream_probability = 0.3;
  } else if (name == "SSH" || name == "interactive") {
    tcp_server(name == "SSH" ? ServerKind::kSsh : ServerKind::kInteractive);
    p.request_length = D::uniform(40, 120);
    p.reply_length = D::pareto(1.5, 100, 1e5);
    p.requests_per_flow = D::uniform_int(5, 30);
    p.time_between_requests = D::pareto(1.5, 0.2, 30);
    p.time_to_respond = D::uniform(0.001, 0.005);
  } else if (name == "FTP") {
    tcp_server(ServerKind::kFtp);
    p.request_length = D::uniform(50, 200);
    p.reply_length = D::pareto(1.2, 20000, 5e6);
    p.requests_per_flow = D::uniform_int(1, 3);
    p.time_between_requests = D::uniform(0.1, 1.0);
    p.time_to_respond = D::uniform(0.001, 0.02);
  } else if (name == "mail") {
    tcp_server(ServerKind::kMail);
    p.request_length = D::pareto(1.4, 2000, 2e6);
    p.reply_length = D::uniform(100, 400);
    p.requests_per_flow = D::uniform_int(1, 3);
    p.time_between_requests = D::uniform(0.1, 1.0);
    p.time_to_respond = D::uniform(0.005, 0.05);
  } else if (name == "ping") {
    p.transport = Transport::kIcmp;
    p.request_length = D::constant(56);
    p.reply_length = D::constant(56);
    p.requests_per_flow = D::uniform_int(1, 4);
    p.time_between_requests = D::constant(1.0);
    p.time_to_respond = D::constant(0);
  } else if (name == "backup") {
    tcp_server(ServerKind::kBackup);
    p.request_length = D::pareto(1.2, 100000, 5e6);
    p.reply_length = D::uniform(100, 200);
    p.requests_per_flow = D::constant(1);
  } else if (name == "streaming") {
    udp_server(ServerKind::kStreaming);
    p.request_length = D::uniform(100, 200);
    p.reply_length = D::uniform(1000, 1400);
    p.replies_per_request = D::uniform_int(20, 200);
    p.requests_per_flow = D::constant(1);
    p.time_to_respond = D::uniform(0.005, 0.02);
  } else {  // misc
    udp_server(ServerKind::kMisc);
    p.request_length = D::uniform(50, 500);
    p.reply_length = D::uniform(50, 1000);
    p.requests_per_flow = D::uniform_int(1, 3);
    p.time_between_requests = D::uniform(0.1, 1.0);
  }
  return p;
}

void TrafficMix::validate() const {
  if (profiles.empty()) throw ConfigError("traffic.mix: empty traffic mix");
  double sum = 0.0;
  std::set<std::uint16_t> ports;
  std::set<std::string> names;
  for (const auto& p : profiles) {
    p.validate();
    sum += p.selection_probability;
    if (!names.insert(p.name).second) throw ConfigError("traffic.mix: duplicate profile " + p.name);
    if (p.transport != Transport::kIcmp && !ports.insert(p.server_port).second) {
      throw ConfigError("traffic.profiles." + p.name + ".server_port: port " + std::to_string(p.server_port) +
                        " is used by another profile");
    }
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("traffic.mix: selection probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
}

const TrafficProfile* TrafficMix::find(std::string_view name) const {
  std::string want(name);
  if (name == "nameserver") want = "DNS";
  if (name == "Email" || name == "email") want = "mail";
  for (const auto& p : profiles)
    if (p.name == want) return &p;
  return nullptr;
}

namespace {

TrafficMix make_mix(const std::vector<std::pair<const char*, double>>& shares, int category) {
  TrafficMix mix;
  for (const auto& [name, share] : shares) {
    TrafficProfile p = default_profile(name, category);
    p.selection_probability = share;
    mix.profiles.push_back(std::move(p));
  }
  return mix;
}

}  // namespace

TrafficMix TrafficMix::category1() {
  return make_mix({{"HTTP", 0.5385},
                   {"HTTPS", 0.3813},
                   {"DNS", 0.0687},
                   {"SSH", 0.0078},
                   {"FTP", 0.0020},
                   {"mail", 0.0014},
                   {"ping", 0.0003}},
                  1);
}

TrafficMix TrafficMix::category2() {
  // The published shares total 99.7%; the remaining 0.3% is carried by misc.
  return make_mix({{"HTTPS", 0.492}, {"HTTP", 0.355}, {"DNS", 0.089}, {"FTP", 0.033}, {"mail", 0.028}, {"misc", 0.003}}, 2);
}

TrafficMix TrafficMix::single(const TrafficProfile& profile) {
  TrafficMix mix;
  mix.profiles.push_back(profile);
  mix.profiles.back().selection_probability = 1.0;
  return mix;
}

std::size_t select_profile(const TrafficMix& mix, RngStream& rng) {
  if (mix.profiles.empty()) throw ConfigError("select_profile: empty traffic mix");
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < mix.profiles.size(); ++i) {
    acc += mix.profiles[i].selection_probability;
    if (u < acc) return i;
  }
  // Rounding residue: last profile with positive probability.
  for (std::size_t i = mix.profiles.size(); i-- > 0;)
    if (mix.profiles[i].selection_probability > 0.0) return i;
  return mix.profiles.size() - 1;
}

PortAllocator::PortAllocator() : used_(kRange, 0) {}

std::uint16_t PortAllocator::allocate(RngStream& rng) {
  std::uint16_t port;
  if (in_use_ == kRange) {
    while (!order_.empty() && !in_use(order_.front())) order_.pop_front();
    port = order_.front();
    order_.pop_front();
    ++reused_;
  } else {
    do {
      port = static_cast<std::uint16_t>(rng.uniform_int(kEphemeralLow, kEphemeralHigh));
    } while (in_use(port));
    used_[port - kEphemeralLow] = 1;
    ++in_use_;
  }
  order_.push_back(port);
  if (order_.size() > 4 * kRange) {
    std::deque<std::uint16_t> live;
    for (auto p : order_)
      if (in_use(p)) live.push_back(p);
    order_.swap(live);
  }
  return port;
}

void PortAllocator::release(std::uint16_t port) {
  if (port < kEphemeralLow) return;
  auto& u = used_[port - kEphemeralLow];
  if (u) {
    u = 0;
    --in_use_;
  }
}

}  // namespace wormbench
