#include "wormbench/tcp.hpp"

#include <algorithm>
#include <stdexcept>

#include "wormbench/packet.hpp"

namespace wormbench {

using namespace tcp_flags;

const char* to_string(TcpState s) {
  switch (s) {
    case TcpState::kSynSent: return "SYN_SENT";
    case TcpState::kSynRcvd: return "SYN_RCVD";
    case TcpState::kEstablished: return "ESTABLISHED";
    case TcpState::kFinWait: return "FIN_WAIT";
    case TcpState::kClosed: return "CLOSED";
  }
  return "?";
}

TcpConnection::TcpConnection(const TcpConfig& config, std::uint32_t iss)
    : config_(config), iss_(iss), cwnd_(config.initial_cwnd), ssthresh_(config.initial_ssthresh) {}

TcpConnection TcpConnection::client(const TcpConfig& config, std::uint32_t iss) { return TcpConnection(config, iss); }

TcpConnection TcpConnection::server(const TcpConfig& config, std::uint32_t iss, const TcpSegment& syn, SimTime now,
                                    TcpOutput& out) {
  if (!(syn.flags & kSyn)) throw std::logic_error("TcpConnection::server: first segment must be a SYN");
  TcpConnection c(config, iss);
  c.state_ = TcpState::kSynRcvd;
  c.irs_ = syn.seq;
  c.rcv_nxt_ = 1;
  c.emit(out, 0, kSyn | kAck, 0);
  c.snd_nxt_ = c.snd_max_ = 1;
  c.timer_ = now + config.rto;
  out.timer = c.timer_;
  return c;
}

std::uint64_t TcpConnection::bytes_acked() const {
  if (snd_una_ <= 1) return 0;
  return std::min(snd_una_, app_end_) - 1;
}

void TcpConnection::emit(TcpOutput& out, std::uint64_t offset, std::uint8_t flags, std::uint32_t len) {
  TcpSegment s;
  s.seq = static_cast<std::uint32_t>(iss_ + offset);
  s.flags = flags;
  s.len = len;
  if (flags & kAck) s.ack = static_cast<std::uint32_t>(irs_ + rcv_nxt_);
  out.segments.push_back(s);
  ++segments_sent_;
  if (offset < snd_max_ && (len > 0 || (flags & (kSyn | kFin)))) ++retransmitted_segments_;
}

void TcpConnection::emit_ack(TcpOutput& out) { emit(out, snd_nxt_, kAck, 0); }

TcpOutput TcpConnection::open(SimTime now) {
  if (state_ != TcpState::kClosed || snd_max_ != 0) throw std::logic_error("TcpConnection::open: already opened");
  TcpOutput out;
  state_ = TcpState::kSynSent;
  emit(out, 0, kSyn, 0);
  snd_nxt_ = snd_max_ = 1;
  timer_ = now + config_.rto;
  out.timer = timer_;
  return out;
}

TcpOutput TcpConnection::send(std::uint64_t bytes, SimTime now) {
  if (close_requested_) throw std::logic_error("TcpConnection::send after close");
  TcpOutput out;
  app_end_ += bytes;
  if (state_ == TcpState::kEstablished) {
    pump(now, out);
    if (snd_una_ >= app_end_) out.send_complete = true;
  }
  out.timer = timer_;
  return out;
}

TcpOutput TcpConnection::close(SimTime now) {
  TcpOutput out;
  if (close_requested_ || state_ == TcpState::kClosed) {
    out.timer = timer_;
    return out;
  }
  close_requested_ = true;
  if (state_ == TcpState::kEstablished) pump(now, out);
  out.timer = timer_;
  return out;
}

TcpSegment TcpConnection::abort() {
  TcpSegment rst;
  rst.seq = static_cast<std::uint32_t>(iss_ + snd_nxt_);
  rst.flags = kRst;
  state_ = TcpState::kClosed;
  timer_.reset();
  return rst;
}

void TcpConnection::pump(SimTime now, TcpOutput& out) {
  const std::uint64_t window = std::uint64_t{cwnd_} * config_.mss;
  while (snd_nxt_ < app_end_ && snd_nxt_ - snd_una_ < window) {
    const auto len = static_cast<std::uint32_t>(std::min<std::uint64_t>(config_.mss, app_end_ - snd_nxt_));
    emit(out, snd_nxt_, kAck | kPsh, len);
    snd_nxt_ += len;
  }
  if (close_requested_ && snd_nxt_ == app_end_) {
    emit(out, snd_nxt_, kFin | kAck, 0);
    snd_nxt_ = app_end_ + 1;
    state_ = TcpState::kFinWait;
  }
  snd_max_ = std::max(snd_max_, snd_nxt_);
  if (!timer_ && outstanding() > 0) timer_ = now + config_.rto;
}

void TcpConnection::handle_ack(const TcpSegment& seg, SimTime now, TcpOutput& out) {
  if (!(seg.flags & kAck)) return;
  const std::uint64_t ack = static_cast<std::uint32_t>(seg.ack - iss_);
  if (ack <= snd_una_ || ack > snd_max_) return;
  const bool data_was_pending = snd_una_ < app_end_;
  snd_una_ = ack;
  snd_nxt_ = std::max(snd_nxt_, snd_una_);
  retries_ = 0;
  if (cwnd_ < ssthresh_) {
    ++cwnd_;
  } else if (++ca_acks_ >= cwnd_) {
    ++cwnd_;
    ca_acks_ = 0;
  }
  if (data_was_pending && snd_una_ >= app_end_ && app_end_ > 1) out.send_complete = true;
  if (close_requested_ && snd_una_ == app_end_ + 1) fin_acked_ = true;
  timer_ = outstanding() > 0 ? std::optional<SimTime>(now + config_.rto) : std::nullopt;
}

void TcpConnection::finish(TcpOutput& out) {
  state_ = TcpState::kClosed;
  closed_cleanly_ = true;
  timer_.reset();
  out.closed = true;
}

TcpOutput TcpConnection::on_segment(const TcpSegment& seg, SimTime now) {
  TcpOutput out;
  if (state_ == TcpState::kClosed) {
    // A peer retransmitting its FIN after we finished still needs our ACK.
    if (closed_cleanly_ && (seg.flags & kFin) && !(seg.flags & kRst)) {
      emit_ack(out);
    } else {
      out.dropped_closed = true;
    }
    return out;
  }
  if (seg.flags & kRst) {
    state_ = TcpState::kClosed;
    timer_.reset();
    out.failed = true;
    return out;
  }

  switch (state_) {
    case TcpState::kSynSent:
      if ((seg.flags & kSyn) && (seg.flags & kAck) && static_cast<std::uint32_t>(seg.ack - iss_) == 1) {
        irs_ = seg.seq;
        rcv_nxt_ = 1;
        snd_una_ = 1;
        retries_ = 0;
        state_ = TcpState::kEstablished;
        timer_.reset();
        out.connected = true;
        emit_ack(out);
        pump(now, out);
      }
      out.timer = timer_;
      return out;
    case TcpState::kSynRcvd:
      if (seg.flags & kSyn) {
        emit(out, 0, kSyn | kAck, 0);
        out.timer = timer_;
        return out;
      }
      if (!(seg.flags & kAck) || static_cast<std::uint32_t>(seg.ack - iss_) < 1) {
        out.timer = timer_;
        return out;
      }
      state_ = TcpState::kEstablished;
      out.connected = true;
      if (snd_una_ < 1) {
        snd_una_ = 1;
        retries_ = 0;
        timer_.reset();
      }
      break;
    default:
      if (seg.flags & kSyn) {
        // Our handshake ACK was lost; repeat it.
        emit_ack(out);
        out.timer = timer_;
        return out;
      }
      break;
  }

  handle_ack(seg, now, out);

  bool need_ack = false;
  const std::uint64_t off = static_cast<std::uint32_t>(seg.seq - irs_);
  if (seg.len > 0) {
    need_ack = true;
    if (off == rcv_nxt_ && !peer_fin_) {
      rcv_nxt_ += seg.len;
      out.delivered += seg.len;
    }
  }
  if (seg.flags & kFin) {
    need_ack = true;
    if (off + seg.len == rcv_nxt_ && !peer_fin_) {
      rcv_nxt_ += 1;
      peer_fin_ = true;
      out.peer_closed = true;
    }
  }

  const std::size_t before = out.segments.size();
  pump(now, out);
  if (need_ack && out.segments.size() == before) emit_ack(out);
  if (fin_acked_ && peer_fin_) finish(out);
  out.timer = timer_;
  return out;
}

TcpOutput TcpConnection::on_timer(SimTime now) {
  TcpOutput out;
  if (state_ == TcpState::kClosed || !timer_ || now < *timer_) {
    out.timer = timer_;
    return out;
  }
  timer_.reset();
  if (outstanding() == 0) return out;
  ++retries_;
  const bool handshake = state_ == TcpState::kSynSent || state_ == TcpState::kSynRcvd;
  const std::uint32_t limit = handshake ? config_.max_syn_retransmissions : config_.max_retransmissions;
  if (retries_ > limit) {
    state_ = TcpState::kClosed;
    out.failed = true;
    return out;
  }
  if (state_ == TcpState::kSynSent) {
    emit(out, 0, kSyn, 0);
  } else if (state_ == TcpState::kSynRcvd) {
    emit(out, 0, kSyn | kAck, 0);
  } else {
    const std::uint64_t flight_segments = (outstanding() + config_.mss - 1) / config_.mss;
    ssthresh_ = std::max<std::uint32_t>(static_cast<std::uint32_t>(flight_segments / 2), 2);
    cwnd_ = 1;
    ca_acks_ = 0;
    snd_nxt_ = snd_una_;
    if (state_ == TcpState::kFinWait && snd_nxt_ <= app_end_) state_ = TcpState::kEstablished;
    pump(now, out);
  }
  timer_ = now + config_.rto;
  out.timer = timer_;
  return out;
}

}  // namespace wormbench
