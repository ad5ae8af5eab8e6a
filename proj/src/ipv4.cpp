#include "wormbench/ipv4.hpp"

#include <charconv>
#include <stdexcept>

namespace wormbench {

Ipv4 Ipv4::parse(std::string_view text) {
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 4; ++i) {
    unsigned octet = 0;
    auto [next, ec] = std::from_chars(p, end, octet);
    if (ec != std::errc() || next == p || octet > 255) {
      throw std::invalid_argument("invalid IPv4 address: " + std::string(text));
    }
    value = (value << 8) | octet;
    p = next;
    if (i < 3) {
      if (p == end || *p != '.') throw std::invalid_argument("invalid IPv4 address: " + std::string(text));
      ++p;
    }
  }
  if (p != end) throw std::invalid_argument("invalid IPv4 address: " + std::string(text));
  return Ipv4(value);
}

std::string Ipv4::to_string() const {
  std::string s;
  s.reserve(15);
  for (int i = 0; i < 4; ++i) {
    if (i) s.push_back('.');
    s += std::to_string(octet(i));
  }
  return s;
}

Cidr Cidr::parse(std::string_view text) {
  const auto slash = text.find('/');
  Cidr c;
  if (slash == std::string_view::npos) {
    c.base = Ipv4::parse(text);
    c.length = 32;
    return c;
  }
  c.base = Ipv4::parse(text.substr(0, slash));
  const auto len_text = text.substr(slash + 1);
  auto [next, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), c.length);
  if (ec != std::errc() || next != len_text.data() + len_text.size() || c.length < 0 || c.length > 32) {
    throw std::invalid_argument("invalid CIDR prefix: " + std::string(text));
  }
  if ((c.base.value & ~prefix_mask(c.length)) != 0) {
    throw std::invalid_argument("CIDR base has host bits set: " + std::string(text));
  }
  return c;
}

std::string Cidr::to_string() const { return base.to_string() + "/" + std::to_string(length); }

std::uint32_t ones_complement_sum(std::span<const std::uint8_t> bytes, std::uint32_t initial) {
  std::uint64_t sum = initial;
  std::size_t i = 0;
  for (; i + 1 < bytes.size(); i += 2) sum += (std::uint32_t{bytes[i]} << 8) | bytes[i + 1];
  if (i < bytes.size()) sum += std::uint32_t{bytes[i]} << 8;
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint32_t>(sum);
}

std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes, std::uint32_t initial) {
  return static_cast<std::uint16_t>(~ones_complement_sum(bytes, initial) & 0xffff);
}

}  // namespace wormbench
