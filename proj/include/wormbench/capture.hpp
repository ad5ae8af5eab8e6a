#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "wormbench/network.hpp"
#include "wormbench/packet.hpp"

namespace wormbench {

inline constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4u;
inline constexpr std::uint16_t kPcapVersionMajor = 2;
inline constexpr std::uint16_t kPcapVersionMinor = 4;
inline constexpr std::uint32_t kPcapSnaplen = 65535;
inline constexpr std::uint32_t kLinktypeRawIpv4 = 101;
inline constexpr std::size_t kPcapGlobalHeaderBytes = 24;
inline constexpr std::size_t kPcapRecordHeaderBytes = 16;

// Classic microsecond pcap, little-endian. Records are buffered and appended
// to the file in chunks, so thousands of writers can coexist without holding
// a descriptor each.
class PcapWriter {
 public:
  // Creates (truncates) the file and writes the global header. Throws RuntimeFailure on I/O errors.
  PcapWriter(std::filesystem::path path, std::uint32_t linktype = kLinktypeRawIpv4,
             std::size_t buffer_bytes = 32 * 1024);
  ~PcapWriter();
  PcapWriter(const PcapWriter&) = delete;
  PcapWriter& operator=(const PcapWriter&) = delete;

  // Appends one record holding `datagram`. Throws RuntimeFailure if t is
  // earlier than the previous record's time.
  void write(SimTime t, const std::vector<std::uint8_t>& datagram);
  void flush();
  void close();

  const std::filesystem::path& path() const { return path_; }
  std::uint64_t packet_count() const { return count_; }
  SimTime last_timestamp() const { return last_; }

 private:
  std::filesystem::path path_;
  std::vector<std::uint8_t> buf_;
  std::size_t limit_;
  std::uint64_t count_ = 0;
  SimTime last_;
  bool closed_ = false;
};

struct PcapRecord {
  std::uint32_t ts_sec = 0;
  std::uint32_t ts_usec = 0;
  std::uint32_t orig_len = 0;
  std::vector<std::uint8_t> data;
  std::int64_t micros() const { return std::int64_t{ts_sec} * 1'000'000 + ts_usec; }
};

struct PcapFile {
  std::uint32_t magic = 0;
  std::uint16_t version_major = 0;
  std::uint16_t version_minor = 0;
  std::uint32_t snaplen = 0;
  std::uint32_t linktype = 0;
  std::vector<PcapRecord> records;
};

// Strict reader for the files PcapWriter produces. Throws AnalysisError on
// truncation or a header it does not understand.
PcapFile read_pcap(const std::filesystem::path& path);

// Record-at-a-time reader with the same checks, for files too large to hold.
class PcapReader {
 public:
  explicit PcapReader(const std::filesystem::path& path);
  // Global header fields; records stay empty.
  const PcapFile& header() const { return header_; }
  // False at a clean end of file.
  bool next(PcapRecord& r);
  std::uint64_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  PcapFile header_;
  std::uint64_t offset_ = 0;
  std::uint64_t count_ = 0;
};

// Decoded IPv4 fields of one captured datagram.
struct DatagramView {
  Ipv4 src;
  Ipv4 dst;
  std::uint8_t protocol = 0;
  std::uint16_t ip_id = 0;
  std::uint16_t total_length = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t tcp_flags = 0;
  std::uint32_t payload_len = 0;
  bool header_checksum_ok = false;
};
// Throws AnalysisError if the bytes are not a well-formed IPv4 datagram.
DatagramView parse_datagram(const std::vector<std::uint8_t>& data);

// File name of a node's capture.
std::string pcap_file_name(const Node& n);

// Writes one pcap per node of the topology into `dir` (hosts and routers;
// router files stay empty unless router taps are enabled).
class PcapCaptureSink : public CaptureSink {
 public:
  PcapCaptureSink(const Topology& topo, std::filesystem::path dir, SerializeOptions serialize);
  void record(NodeId node, SimTime t, const Packet& p) override;
  void close();
  std::uint64_t records_written() const { return records_; }
  const PcapWriter& writer(NodeId n) const { return *writers_[n]; }

 private:
  std::vector<std::unique_ptr<PcapWriter>> writers_;
  SerializeOptions serialize_;
  std::vector<std::uint8_t> scratch_;
  std::uint64_t records_ = 0;
};

// Lowercase hex SHA-256.
std::string sha256_hex(const std::uint8_t* data, std::size_t len);
std::string sha256_hex(const std::string& s);
// Throws RuntimeFailure if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace wormbench
