#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wormbench/rng.hpp"
#include "wormbench/sim_time.hpp"
#include "wormbench/topology.hpp"

namespace wormbench {

// Pareto variate x_min * u^(-1/alpha), u uniform on (0, 1].
// Throws std::invalid_argument unless alpha > 1 and x_min > 0.
double draw_heavy_tailed(double alpha, double x_min, RngStream& rng);

// Scalar distribution used for profile parameters. Sizes are in bytes,
// durations in seconds, counts are rounded to integers by the caller.
struct Distribution {
  enum class Kind : std::uint8_t { kConstant, kUniform, kUniformInt, kExponential, kPareto };

  Kind kind = Kind::kConstant;
  double a = 0.0;    // constant value | lower bound | mean | shape alpha
  double b = 0.0;    // upper bound | x_min (Pareto)
  double cap = 0.0;  // Pareto truncation point, 0 = none

  static Distribution constant(double v) { return {Kind::kConstant, v, 0.0, 0.0}; }
  static Distribution uniform(double lo, double hi) { return {Kind::kUniform, lo, hi, 0.0}; }
  static Distribution uniform_int(double lo, double hi) { return {Kind::kUniformInt, lo, hi, 0.0}; }
  static Distribution exponential(double mean) { return {Kind::kExponential, mean, 0.0, 0.0}; }
  static Distribution pareto(double alpha, double x_min, double cap = 0.0) { return {Kind::kPareto, alpha, x_min, cap}; }

  double draw(RngStream& rng) const;
  // Throws ConfigError naming `field` when parameters are invalid.
  void validate(const std::string& field) const;
  bool heavy_tailed() const { return kind == Kind::kPareto; }

  bool operator==(const Distribution&) const = default;
};

enum class Transport : std::uint8_t { kTcp, kUdp, kIcmp };
const char* to_string(Transport t);
Transport transport_from_string(std::string_view s);

// One application class of background traffic.
struct TrafficProfile {
  std::string name;
  Transport transport = Transport::kTcp;
  std::optional<ServerKind> server_kind;  // none for ping: any host answers
  std::uint16_t server_port = 0;

  Distribution request_length;
  Distribution reply_length;
  Distribution requests_per_flow;
  Distribution time_between_requests;
  Distribution replies_per_request;
  Distribution time_to_respond;
  Distribution time_between_flows;
  double selection_probability = 0.0;
  double wan_probability = 0.0;
  // Probability that a server of this kind queries a peer server of the same
  // kind before answering (recursive DNS).
  double upstream_probability = 0.0;

  void validate() const;
};

// The twelve built-in profile names: HTTP, HTTPS, DNS, SSH, FTP, mail, ping,
// web, backup, interactive, streaming, misc.
const std::vector<std::string>& profile_names();
// Accepts the canonical names plus the aliases "nameserver" and "Email".
std::string canonical_profile_name(std::string_view name);
// Stand-in parameter set. category is 1 or 2; selection_probability is left 0.
TrafficProfile default_profile(std::string_view name, int category = 1);

struct TrafficMix {
  std::vector<TrafficProfile> profiles;

  // Throws ConfigError: empty mix, probabilities not summing to 1 +- 1e-9,
  // duplicate server ports, or invalid profile parameters.
  void validate() const;
  const TrafficProfile* find(std::string_view name) const;

  static TrafficMix category1();
  static TrafficMix category2();
  static TrafficMix single(const TrafficProfile& profile);
};

// Draws a profile index with the mix's selection probabilities.
std::size_t select_profile(const TrafficMix& mix, RngStream& rng);

inline constexpr std::uint16_t kEphemeralLow = 49152;
inline constexpr std::uint16_t kEphemeralHigh = 65535;

// Random ephemeral source ports for one host.
class PortAllocator {
 public:
  PortAllocator();

  // Uniform over [49152, 65535] minus ports in use. When every port is taken
  // the least recently allocated one is reused and counted.
  std::uint16_t allocate(RngStream& rng);
  void release(std::uint16_t port);
  bool in_use(std::uint16_t port) const { return used_[port - kEphemeralLow] != 0; }
  std::size_t in_use_count() const { return in_use_; }
  std::uint64_t reuse_count() const { return reused_; }

 private:
  static constexpr std::size_t kRange = kEphemeralHigh - kEphemeralLow + 1;
  std::vector<std::uint8_t> used_;
  std::deque<std::uint16_t> order_;
  std::size_t in_use_ = 0;
  std::uint64_t reused_ = 0;
};

}  // namespace wormbench
