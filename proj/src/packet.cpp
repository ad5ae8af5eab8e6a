#include "wormbench/packet.hpp"

#include "wormbench/rng.hpp"

namespace wormbench {

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::kIcmp: return "ICMP";
    case Protocol::kTcp: return "TCP";
    case Protocol::kUdp: return "UDP";
  }
  return "?";
}

std::uint32_t Packet::header_bytes() const {
  switch (protocol) {
    case Protocol::kTcp: return kIpv4HeaderBytes + kTcpHeaderBytes;
    case Protocol::kUdp: return kIpv4HeaderBytes + kUdpHeaderBytes;
    case Protocol::kIcmp: return kIpv4HeaderBytes + kIcmpHeaderBytes;
  }
  return kIpv4HeaderBytes;
}

namespace {

void put16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v);
}

void put32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

void fill_payload(std::uint8_t* p, std::uint32_t len, std::uint64_t seed, std::uint64_t packet_id) {
  std::uint64_t state = splitmix64(seed ^ splitmix64(packet_id));
  std::uint32_t i = 0;
  while (i < len) {
    state = splitmix64(state);
    for (int k = 0; k < 8 && i < len; ++k, ++i) p[i] = static_cast<std::uint8_t>(state >> (8 * k));
  }
}

std::uint32_t pseudo_header_sum(const Packet& pk, std::uint32_t l4_len) {
  std::uint32_t sum = 0;
  sum += pk.src.value >> 16;
  sum += pk.src.value & 0xffff;
  sum += pk.dst.value >> 16;
  sum += pk.dst.value & 0xffff;
  sum += static_cast<std::uint32_t>(pk.protocol);
  sum += l4_len;
  return sum;
}

}  // namespace

void serialize_into(const Packet& pk, const SerializeOptions& opts, std::vector<std::uint8_t>& out) {
  const std::uint32_t total = pk.size_bytes();
  out.assign(total, 0);
  std::uint8_t* ip = out.data();
  ip[0] = 0x45;
  ip[1] = 0;
  put16(ip + 2, static_cast<std::uint16_t>(total));
  put16(ip + 4, static_cast<std::uint16_t>(pk.id & 0xffff));
  put16(ip + 6, 0x4000);  // don't fragment
  ip[8] = 64;
  ip[9] = static_cast<std::uint8_t>(pk.protocol);
  put32(ip + 12, pk.src.value);
  put32(ip + 16, pk.dst.value);
  put16(ip + 10, internet_checksum(std::span<const std::uint8_t>(ip, kIpv4HeaderBytes)));

  std::uint8_t* l4 = ip + kIpv4HeaderBytes;
  const std::uint32_t l4_len = total - kIpv4HeaderBytes;
  const std::uint32_t hdr = pk.header_bytes() - kIpv4HeaderBytes;
  fill_payload(l4 + hdr, pk.payload_len, opts.payload_seed, pk.id);

  switch (pk.protocol) {
    case Protocol::kUdp: {
      put16(l4, pk.src_port);
      put16(l4 + 2, pk.dst_port);
      put16(l4 + 4, static_cast<std::uint16_t>(l4_len));
      if (opts.full_checksums) {
        std::uint16_t c = internet_checksum(std::span<const std::uint8_t>(l4, l4_len), pseudo_header_sum(pk, l4_len));
        put16(l4 + 6, c == 0 ? 0xffff : c);
      }
      break;
    }
    case Protocol::kTcp: {
      put16(l4, pk.src_port);
      put16(l4 + 2, pk.dst_port);
      put32(l4 + 4, pk.seq);
      put32(l4 + 8, pk.ack);
      l4[12] = 5 << 4;
      l4[13] = pk.tcp_flags;
      put16(l4 + 14, 0xffff);
      if (opts.full_checksums) {
        put16(l4 + 16, internet_checksum(std::span<const std::uint8_t>(l4, l4_len), pseudo_header_sum(pk, l4_len)));
      }
      break;
    }
    case Protocol::kIcmp: {
      l4[0] = pk.icmp_type;
      l4[1] = 0;
      put16(l4 + 4, pk.icmp_id);
      put16(l4 + 6, pk.icmp_seq);
      put16(l4 + 2, internet_checksum(std::span<const std::uint8_t>(l4, l4_len)));
      break;
    }
  }
}

std::vector<std::uint8_t> serialize(const Packet& p, const SerializeOptions& opts) {
  std::vector<std::uint8_t> out;
  serialize_into(p, opts, out);
  return out;
}

}  // namespace wormbench
