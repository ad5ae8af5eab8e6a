#include "wormbench/capture.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>

#include "wormbench/errors.hpp"

namespace wormbench {

namespace {

void le16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void le32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t rd_le32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}
std::uint16_t rd_le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }
std::uint16_t rd_be16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }
std::uint32_t rd_be32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3];
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& b, const char* mode) {
  std::FILE* f = std::fopen(path.c_str(), mode);
  if (!f) throw RuntimeFailure("cannot open " + path.string() + " for writing");
  const bool ok = b.empty() || std::fwrite(b.data(), 1, b.size(), f) == b.size();
  if (std::fclose(f) != 0 || !ok) throw RuntimeFailure("write failed: " + path.string());
}

std::string to_hex(const unsigned char* md, unsigned n) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < n; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace

PcapWriter::PcapWriter(std::filesystem::path path, std::uint32_t linktype, std::size_t buffer_bytes)
    : path_(std::move(path)), limit_(buffer_bytes) {
  std::vector<std::uint8_t> h;
  le32(h, kPcapMagic);
  le16(h, kPcapVersionMajor);
  le16(h, kPcapVersionMinor);
  le32(h, 0);  // thiszone
  le32(h, 0);  // sigfigs
  le32(h, kPcapSnaplen);
  le32(h, linktype);
  write_bytes(path_, h, "wb");
}

PcapWriter::~PcapWriter() {
  try {
    close();
  } catch (...) {
  }
}

void PcapWriter::write(SimTime t, const std::vector<std::uint8_t>& datagram) {
  if (closed_) throw RuntimeFailure("pcap writer already closed: " + path_.string());
  if (t < last_) {
    throw RuntimeFailure("pcap timestamp regression in " + path_.string() + ": " + t.to_string() + " after " +
                         last_.to_string());
  }
  last_ = t;
  const auto ns = t.ns();
  le32(buf_, static_cast<std::uint32_t>(ns / 1'000'000'000));
  le32(buf_, static_cast<std::uint32_t>((ns % 1'000'000'000) / 1'000));
  le32(buf_, static_cast<std::uint32_t>(datagram.size()));
  le32(buf_, static_cast<std::uint32_t>(datagram.size()));
  buf_.insert(buf_.end(), datagram.begin(), datagram.end());
  ++count_;
  if (buf_.size() >= limit_) flush();
}

void PcapWriter::flush() {
  if (buf_.empty()) return;
  write_bytes(path_, buf_, "ab");
  buf_.clear();
}

void PcapWriter::close() {
  if (closed_) return;
  flush();
  closed_ = true;
}

PcapReader::PcapReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw AnalysisError("cannot open " + path.string());
  std::uint8_t h[kPcapGlobalHeaderBytes];
  in_.read(reinterpret_cast<char*>(h), sizeof h);
  if (in_.gcount() != static_cast<std::streamsize>(sizeof h)) throw AnalysisError(path.string() + ": truncated global header");
  header_.magic = rd_le32(h);
  if (header_.magic != kPcapMagic) throw AnalysisError(path.string() + ": not a little-endian microsecond pcap");
  header_.version_major = rd_le16(h + 4);
  header_.version_minor = rd_le16(h + 6);
  header_.snaplen = rd_le32(h + 16);
  header_.linktype = rd_le32(h + 20);
  offset_ = kPcapGlobalHeaderBytes;
}

bool PcapReader::next(PcapRecord& r) {
  std::uint8_t h[kPcapRecordHeaderBytes];
  in_.read(reinterpret_cast<char*>(h), sizeof h);
  const auto got = in_.gcount();
  if (got == 0) return false;
  if (got != static_cast<std::streamsize>(sizeof h)) {
    throw AnalysisError(path_.string() + ": truncated record header at offset " + std::to_string(offset_));
  }
  r.ts_sec = rd_le32(h);
  r.ts_usec = rd_le32(h + 4);
  const std::uint32_t incl = rd_le32(h + 8);
  r.orig_len = rd_le32(h + 12);
  offset_ += kPcapRecordHeaderBytes;
  if (incl > header_.snaplen) throw AnalysisError(path_.string() + ": record longer than snaplen at offset " + std::to_string(offset_));
  r.data.resize(incl);
  in_.read(reinterpret_cast<char*>(r.data.data()), incl);
  if (in_.gcount() != static_cast<std::streamsize>(incl)) {
    throw AnalysisError(path_.string() + ": truncated record at offset " + std::to_string(offset_));
  }
  offset_ += incl;
  ++count_;
  return true;
}

PcapFile read_pcap(const std::filesystem::path& path) {
  PcapReader rd(path);
  PcapFile f = rd.header();
  PcapRecord r;
  while (rd.next(r)) f.records.push_back(r);
  return f;
}

DatagramView parse_datagram(const std::vector<std::uint8_t>& d) {
  if (d.size() < kIpv4HeaderBytes || d[0] != 0x45) throw AnalysisError("not an option-free IPv4 datagram");
  DatagramView v;
  v.total_length = rd_be16(d.data() + 2);
  if (v.total_length != d.size()) throw AnalysisError("IPv4 total length disagrees with the record length");
  v.ip_id = rd_be16(d.data() + 4);
  v.protocol = d[9];
  v.src = Ipv4(rd_be32(d.data() + 12));
  v.dst = Ipv4(rd_be32(d.data() + 16));
  v.header_checksum_ok = ones_complement_sum(std::span<const std::uint8_t>(d.data(), kIpv4HeaderBytes)) == 0xffff;
  const std::uint8_t* l4 = d.data() + kIpv4HeaderBytes;
  const std::size_t l4_len = d.size() - kIpv4HeaderBytes;
  switch (v.protocol) {
    case 6:
      if (l4_len < kTcpHeaderBytes) throw AnalysisError("truncated TCP header");
      v.src_port = rd_be16(l4);
      v.dst_port = rd_be16(l4 + 2);
      v.tcp_flags = l4[13];
      v.payload_len = static_cast<std::uint32_t>(l4_len - (l4[12] >> 4) * 4u);
      break;
    case 17:
      if (l4_len < kUdpHeaderBytes) throw AnalysisError("truncated UDP header");
      v.src_port = rd_be16(l4);
      v.dst_port = rd_be16(l4 + 2);
      v.payload_len = static_cast<std::uint32_t>(l4_len - kUdpHeaderBytes);
      break;
    case 1:
      if (l4_len < kIcmpHeaderBytes) throw AnalysisError("truncated ICMP header");
      v.payload_len = static_cast<std::uint32_t>(l4_len - kIcmpHeaderBytes);
      break;
    default: throw AnalysisError("unexpected IP protocol " + std::to_string(v.protocol));
  }
  return v;
}

std::string pcap_file_name(const Node& n) { return n.address.to_string() + ".pcap"; }

PcapCaptureSink::PcapCaptureSink(const Topology& topo, std::filesystem::path dir, SerializeOptions serialize)
    : serialize_(serialize) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& n : topo.nodes) writers_.push_back(std::make_unique<PcapWriter>(dir / pcap_file_name(n)));
}

void PcapCaptureSink::record(NodeId node, SimTime t, const Packet& p) {
  serialize_into(p, serialize_, scratch_);
  writers_[node]->write(t, scratch_);
  ++records_;
}

void PcapCaptureSink::close() {
  for (auto& w : writers_) w->close();
}

std::string sha256_hex(const std::uint8_t* data, std::size_t len) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  if (EVP_Digest(data, len, md, &n, EVP_sha256(), nullptr) != 1) throw RuntimeFailure("SHA-256 failed");
  return to_hex(md, n);
}

std::string sha256_hex(const std::string& s) {
  return sha256_hex(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw RuntimeFailure("SHA-256 init failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &n);
  return to_hex(md, n);
}

}  // namespace wormbench
