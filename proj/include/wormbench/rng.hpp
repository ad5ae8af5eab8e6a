#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

namespace wormbench {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

// Per-run seed derivation: run k of a scenario with seed s uses mix_seed(s, k).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k);

// A labeled, deterministic random stream. The engine is mt19937_64 (its output
// sequence is fixed by the C++ standard); all conversions to real and integer
// variates are implemented here so draws are identical across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t global_seed, std::string label);

  const std::string& label() const { return label_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform01();
  // Uniform on (0, 1].
  double uniform_open0();
  double uniform(double lo, double hi);
  // Uniform integer on [lo, hi], unbiased.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  bool bernoulli(double p);
  double exponential(double mean);
  // Number of Bernoulli(p) trials up to and including the first success (>= 1).
  std::uint64_t geometric(double p);

 private:
  std::string label_;
  std::mt19937_64 engine_;
};

// Owns the streams of one run, keyed by label.
class RngRegistry {
 public:
  explicit RngRegistry(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  // Repeated calls with the same label return the same (continuing) stream.
  RngStream& stream(const std::string& label);

 private:
  std::uint64_t seed_;
  std::map<std::string, RngStream> streams_;
};

}  // namespace wormbench
