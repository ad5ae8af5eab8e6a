#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wormbench/sim_time.hpp"

namespace wormbench {

struct TcpSegment {
  std::uint32_t seq = 0;
  std::uint32_t ack = 0;
  std::uint8_t flags = 0;
  std::uint32_t len = 0;
};

struct TcpConfig {
  std::uint32_t mss = 1460;
  SimTime rto = SimTime::from_ms(200);
  std::uint32_t max_retransmissions = 6;
  std::uint32_t max_syn_retransmissions = 3;
  std::uint32_t initial_cwnd = 1;      // segments
  std::uint32_t initial_ssthresh = 64;  // segments
};

enum class TcpState : std::uint8_t { kSynSent, kSynRcvd, kEstablished, kFinWait, kClosed };
const char* to_string(TcpState s);

// Everything one call to the state machine asks its environment to do.
struct TcpOutput {
  std::vector<TcpSegment> segments;
  // Desired retransmission deadline after this step; nullopt = timer stopped.
  std::optional<SimTime> timer;
  bool connected = false;
  std::uint64_t delivered = 0;  // new in-order application bytes
  bool peer_closed = false;
  bool send_complete = false;  // every queued application byte is acknowledged
  bool closed = false;         // orderly close finished
  bool failed = false;         // reset received or retransmissions exhausted
  bool dropped_closed = false;  // segment arrived for a closed connection
};

// Simplified TCP endpoint without I/O: the caller feeds segments, timer
// expiries and application calls, and carries out the returned actions.
// Go-back-N with a fixed RTO: out-of-order segments are discarded, every
// data segment is answered by a cumulative ACK, and on timeout everything
// from the first unacknowledged byte is resent. cwnd starts at one segment,
// grows by one per ACK below ssthresh (slow start) and by one per window
// above it; a timeout sets ssthresh to half the flight (min 2) and cwnd to 1.
class TcpConnection {
 public:
  static TcpConnection client(const TcpConfig& config, std::uint32_t iss);
  // Passive open answering `syn`.
  static TcpConnection server(const TcpConfig& config, std::uint32_t iss, const TcpSegment& syn, SimTime now,
                              TcpOutput& out);

  TcpOutput open(SimTime now);
  TcpOutput send(std::uint64_t bytes, SimTime now);
  // FIN goes out once all queued data has been sent.
  TcpOutput close(SimTime now);
  // Drops all state and returns the RST to emit.
  TcpSegment abort();

  TcpOutput on_segment(const TcpSegment& seg, SimTime now);
  TcpOutput on_timer(SimTime now);

  TcpState state() const { return state_; }
  const TcpConfig& config() const { return config_; }
  std::uint32_t cwnd() const { return cwnd_; }
  std::uint32_t ssthresh() const { return ssthresh_; }
  std::uint64_t bytes_queued() const { return app_end_ - 1; }
  std::uint64_t bytes_acked() const;
  std::uint64_t bytes_received() const { return rcv_nxt_ > 0 ? rcv_nxt_ - 1 - (peer_fin_ ? 1 : 0) : 0; }
  std::uint64_t segments_sent() const { return segments_sent_; }
  std::uint64_t retransmissions() const { return retransmitted_segments_; }
  std::optional<SimTime> timer() const { return timer_; }

 private:
  TcpConnection(const TcpConfig& config, std::uint32_t iss);

  void pump(SimTime now, TcpOutput& out);
  void emit(TcpOutput& out, std::uint64_t offset, std::uint8_t flags, std::uint32_t len);
  void emit_ack(TcpOutput& out);
  void handle_ack(const TcpSegment& seg, SimTime now, TcpOutput& out);
  void finish(TcpOutput& out);
  std::uint64_t outstanding() const { return snd_max_ - snd_una_; }

  TcpConfig config_;
  TcpState state_ = TcpState::kClosed;
  std::uint32_t iss_ = 0;
  std::uint32_t irs_ = 0;
  // Offsets relative to the initial sequence numbers: SYN occupies 0.
  std::uint64_t snd_una_ = 0;
  std::uint64_t snd_nxt_ = 0;
  std::uint64_t snd_max_ = 0;
  std::uint64_t app_end_ = 1;
  std::uint64_t rcv_nxt_ = 0;
  bool close_requested_ = false;
  bool fin_acked_ = false;
  bool peer_fin_ = false;
  bool closed_cleanly_ = false;
  std::uint32_t cwnd_ = 1;
  std::uint32_t ssthresh_ = 64;
  std::uint32_t ca_acks_ = 0;
  std::uint32_t retries_ = 0;
  std::optional<SimTime> timer_;
  std::uint64_t segments_sent_ = 0;
  std::uint64_t retransmitted_segments_ = 0;
};

}  // namespace wormbench
