#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace wormbench {

// IPv4 address in host byte order.
struct Ipv4 {
  std::uint32_t value = 0;

  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t v) : value(v) {}
  static constexpr Ipv4 from_octets(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    return Ipv4((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d);
  }
  // Throws std::invalid_argument on malformed input.
  static Ipv4 parse(std::string_view text);

  constexpr std::uint8_t octet(int i) const { return static_cast<std::uint8_t>(value >> (24 - 8 * i)); }
  std::string to_string() const;

  constexpr auto operator<=>(const Ipv4&) const = default;
};

constexpr std::uint32_t prefix_mask(int len) {
  return len == 0 ? 0u : (0xffffffffu << (32 - len));
}

constexpr bool same_prefix(Ipv4 a, Ipv4 b, int len) {
  return (a.value & prefix_mask(len)) == (b.value & prefix_mask(len));
}

struct Cidr {
  Ipv4 base;
  int length = 32;

  static Cidr parse(std::string_view text);
  std::string to_string() const;
  std::uint64_t size() const { return std::uint64_t{1} << (32 - length); }
  bool contains(Ipv4 a) const { return same_prefix(base, a, length); }
  Ipv4 at(std::uint64_t i) const { return Ipv4(base.value + static_cast<std::uint32_t>(i)); }

  auto operator<=>(const Cidr&) const = default;
};

// Ones-complement sum over big-endian 16-bit words (RFC 1071), not inverted.
std::uint32_t ones_complement_sum(std::span<const std::uint8_t> bytes, std::uint32_t initial = 0);
// Inverted folded checksum as stored in headers.
std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes, std::uint32_t initial = 0);

}  // namespace wormbench
