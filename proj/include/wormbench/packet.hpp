#pragma once

#include <cstdint>
#include <vector>

#include "wormbench/engine.hpp"
#include "wormbench/ipv4.hpp"

namespace wormbench {

enum class Protocol : std::uint8_t { kIcmp = 1, kTcp = 6, kUdp = 17 };
enum class Origin : std::uint8_t { kBackground, kWorm };

const char* to_string(Protocol p);

namespace tcp_flags {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kPsh = 0x08;
inline constexpr std::uint8_t kAck = 0x10;
}  // namespace tcp_flags

inline constexpr std::uint32_t kIpv4HeaderBytes = 20;
inline constexpr std::uint32_t kUdpHeaderBytes = 8;
inline constexpr std::uint32_t kTcpHeaderBytes = 20;
inline constexpr std::uint32_t kIcmpHeaderBytes = 8;
inline constexpr std::uint32_t kMaxUdpPayload = 1500 - kIpv4HeaderBytes - kUdpHeaderBytes;

// A simulated IPv4 datagram. Fields below `payload_len` are simulator
// metadata; only addresses, ports, TCP/ICMP header values and the payload
// length reach the wire bytes.
struct Packet {
  Ipv4 src;
  Ipv4 dst;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::kUdp;
  std::uint8_t tcp_flags = 0;
  std::uint32_t seq = 0;
  std::uint32_t ack = 0;
  std::uint8_t icmp_type = 0;  // 8 echo request, 0 echo reply
  std::uint16_t icmp_id = 0;
  std::uint16_t icmp_seq = 0;
  std::uint32_t payload_len = 0;

  std::uint64_t id = 0;       // unique per run; drives IP id and payload fill
  std::uint64_t flow_id = 0;  // background flow or worm probe/connection id
  Origin origin = Origin::kBackground;
  NodeId src_node = kNoNode;
  NodeId dst_node = kNoNode;   // kNoNode when the address is unassigned
  NodeId drop_node = kNoNode;  // router that discards packets to unassigned addresses

  std::uint32_t header_bytes() const;
  std::uint32_t size_bytes() const { return header_bytes() + payload_len; }
};

struct SerializeOptions {
  std::uint64_t payload_seed = 0;
  // When false, TCP and UDP checksum fields are left zero.
  bool full_checksums = false;
};

// Serializes to a raw IPv4 datagram (network byte order) with a valid header checksum.
std::vector<std::uint8_t> serialize(const Packet& p, const SerializeOptions& opts);
void serialize_into(const Packet& p, const SerializeOptions& opts, std::vector<std::uint8_t>& out);

}  // namespace wormbench
