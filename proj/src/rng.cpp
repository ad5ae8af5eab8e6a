#include "wormbench/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace wormbench {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  return splitmix64(seed ^ splitmix64(k + 0x5851f42d4c957f2dULL));
}

RngStream::RngStream(std::uint64_t global_seed, std::string label)
    : label_(std::move(label)), engine_(splitmix64(global_seed ^ fnv1a64(label_))) {}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open0() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == ~0ULL) return engine_();
  const std::uint64_t n = span + 1;
  // Reject the top partial bucket.
  const std::uint64_t limit = ~0ULL - (~0ULL % n + 1) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return lo + x % n;
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

double RngStream::exponential(double mean) { return -mean * std::log(uniform_open0()); }

std::uint64_t RngStream::geometric(double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("geometric: p must be in (0, 1]");
  if (p == 1.0) return 1;
  const double u = uniform_open0();
  const double k = std::ceil(std::log(u) / std::log1p(-p));
  return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
}

RngStream& RngRegistry::stream(const std::string& label) {
  auto it = streams_.find(label);
  if (it == streams_.end()) it = streams_.emplace(label, RngStream(seed_, label)).first;
  return it->second;
}

}  // namespace wormbench
