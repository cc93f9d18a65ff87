#include "twinsim/transport.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace twinsim {

void UdpFlow::send(std::uint32_t app_seq, SimTime now) {
  ++rec_.scheduled;
  Packet pkt;
  pkt.flow = rec_.id;
  pkt.kind = PacketKind::Data;
  pkt.src = rec_.src;
  pkt.dst = rec_.dst;
  pkt.app_seq = app_seq;
  pkt.payload_bytes = 1024;
  pkt.header_bytes = kUdpHeaderBytes;
  pkt.created_at = now;
  rec_.send_log.emplace_back(app_seq, now);
  net_.inject(rec_.src, pkt);
}

void TcpTraceLog::emit(SimTime t, FlowId flow, const char* event, std::uint64_t cwnd,
                       std::uint64_t ssthresh, SimTime rto, SimTime srtt) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.9f,%u,%s,%llu,%llu,%.6f,%.6f\n", ns_to_seconds(t),
                flow, event, static_cast<unsigned long long>(cwnd),
                static_cast<unsigned long long>(ssthresh), ns_to_seconds(rto),
                ns_to_seconds(srtt));
  text_ += buf;
}

TcpConnection::TcpConnection(Scheduler& sched, Network& net, FlowRecord& rec,
                             NodeId sender, NodeId receiver, TcpParams params,
                             MessageSinkFn sink, TcpTraceLog* trace)
    : sched_(sched),
      net_(net),
      rec_(rec),
      sender_(sender),
      receiver_(receiver),
      p_(params),
      sink_(std::move(sink)),
      trace_(trace) {
  cwnd_ = p_.initial_cwnd_segments * p_.mss;
  ssthresh_ = p_.initial_ssthresh_segments * p_.mss;
  rto_ = p_.initial_rto;
}

void TcpConnection::trace(const char* event, SimTime now) {
  if (trace_) trace_->emit(now, rec_.id, event, cwnd_, ssthresh_, rto_, srtt_);
}

void TcpConnection::send_control(PacketKind kind, NodeId from, NodeId to,
                                 std::uint64_t tseq, SimTime now) {
  Packet pkt;
  pkt.flow = rec_.id;
  pkt.kind = kind;
  pkt.src = from;
  pkt.dst = to;
  pkt.tseq = tseq;
  pkt.payload_bytes = 0;
  pkt.header_bytes = kTcpHeaderBytes;
  pkt.created_at = now;
  net_.inject(from, pkt);
}

void TcpConnection::open(SimTime now) {
  if (phase_ != Phase::Closed) throw std::logic_error("tcp open on non-closed connection");
  phase_ = Phase::SynSent;
  syn_tx_time_ = now;
  send_control(PacketKind::TcpSyn, sender_, receiver_, 0, now);
  arm_timer(now + rto_);
  trace("open", now);
}

void TcpConnection::app_send(SimTime now) {
  ++rec_.scheduled;
  stream_end_ += p_.mss;
  if (phase_ == Phase::Established) try_transmit(now);
}

void TcpConnection::try_transmit(SimTime now) {
  while (snd_next_ < stream_end_ && snd_next_ - snd_una_ + p_.mss <= cwnd_) {
    send_segment(snd_next_, false, now);
    snd_next_ += p_.mss;
  }
}

void TcpConnection::send_segment(std::uint64_t off, bool retransmission, SimTime now) {
  Packet pkt;
  pkt.flow = rec_.id;
  pkt.kind = PacketKind::Data;
  pkt.src = sender_;
  pkt.dst = receiver_;
  pkt.tseq = off;
  pkt.app_seq = static_cast<std::uint32_t>(off / p_.mss);
  pkt.payload_bytes = p_.mss;
  pkt.header_bytes = kTcpHeaderBytes;
  pkt.created_at = now;
  pkt.retransmission = retransmission;
  if (retransmission) {
    for (SentSeg& seg : rtx_queue_) {
      if (seg.off == off) {
        seg.retransmitted = true;
        break;
      }
    }
  } else {
    rtx_queue_.push_back(SentSeg{off, p_.mss, now, false});
    rec_.send_log.emplace_back(pkt.app_seq, now);
  }
  net_.inject(sender_, pkt);
  if (!timer_armed_) arm_timer(now + rto_);
}

SimTime TcpConnection::update_rtt(SimTime sample) {
  if (!have_srtt_) {
    srtt_ = sample;
    rttvar_ = sample / 2;
    have_srtt_ = true;
  } else {
    const SimTime err = srtt_ > sample ? srtt_ - sample : sample - srtt_;
    rttvar_ = (3 * rttvar_) / 4 + err / 4;
    srtt_ = (7 * srtt_) / 8 + sample / 8;
  }
  rto_ = std::clamp(srtt_ + 4 * rttvar_, p_.min_rto, p_.max_rto);
  return rto_;
}

void TcpConnection::arm_timer(SimTime at) {
  const std::uint64_t gen = ++timer_gen_;
  timer_armed_ = true;
  sched_.schedule(at, [this, gen] {
    if (gen == timer_gen_ && timer_armed_) on_timer(sched_.now());
  });
}

void TcpConnection::cancel_timer() {
  ++timer_gen_;
  timer_armed_ = false;
}

void TcpConnection::on_timer(SimTime now) {
  timer_armed_ = false;
  if (phase_ == Phase::SynSent) {
    syn_retransmitted_ = true;
    send_control(PacketKind::TcpSyn, sender_, receiver_, 0, now);
    rto_ = std::min(rto_ * 2, p_.max_rto);
    arm_timer(now + rto_);
    trace("syn-rto", now);
    return;
  }
  if (snd_una_ < snd_next_) {
    enter_loss_episode(now, /*timeout=*/true);
    send_segment(snd_una_, true, now);
    rto_ = std::min(rto_ * 2, p_.max_rto);
    arm_timer(now + rto_);
    dup_acks_ = 0;
    trace("rto", now);
  }
}

void TcpConnection::enter_loss_episode(SimTime now, bool timeout) {
  const std::uint64_t flight = snd_next_ - snd_una_;
  ssthresh_ = std::max(flight / 2, 2 * static_cast<std::uint64_t>(p_.mss));
  cwnd_ = timeout ? p_.mss : ssthresh_;
  trace(timeout ? "loss-timeout" : "loss-fastrtx", now);
}

void TcpConnection::on_packet(NodeId at, const Packet& pkt, SimTime now) {
  switch (pkt.kind) {
    case PacketKind::TcpSyn:
      if (at != receiver_) return;
      if (rphase_ == Phase::Closed || rphase_ == Phase::SynReceived) {
        rphase_ = Phase::SynReceived;
        send_control(PacketKind::TcpSynAck, receiver_, sender_, 0, now);
      }
      return;
    case PacketKind::TcpSynAck:
      if (at != sender_) return;
      if (phase_ == Phase::SynSent) {
        phase_ = Phase::Established;
        if (!syn_retransmitted_) update_rtt(now - syn_tx_time_);
        cancel_timer();
        send_control(PacketKind::TcpAckCtl, sender_, receiver_, 0, now);
        trace("established", now);
        try_transmit(now);
      } else if (phase_ == Phase::Established) {
        send_control(PacketKind::TcpAckCtl, sender_, receiver_, 0, now);
      }
      return;
    case PacketKind::TcpAckCtl:
      if (at != receiver_) return;
      if (rphase_ == Phase::SynReceived) rphase_ = Phase::Established;
      return;
    case PacketKind::Data:
      if (at != receiver_) return;
      // Data implies the peer is established even if the final handshake
      // ack was lost.
      if (rphase_ != Phase::Established) rphase_ = Phase::Established;
      on_data(pkt, now);
      return;
    case PacketKind::TcpAck:
      if (at != sender_) return;
      on_ack(pkt.tseq, now);
      return;
  }
}

void TcpConnection::on_data(const Packet& pkt, SimTime now) {
  if (pkt.tseq == rcv_next_) {
    rcv_next_ += pkt.payload_bytes;
    ++delivered_msgs_;
    sink_(rec_, pkt.app_seq, now);
    // Drain any buffered continuation.
    auto it = ooo_.find(rcv_next_);
    while (it != ooo_.end()) {
      const auto seq = static_cast<std::uint32_t>(it->first / p_.mss);
      rcv_next_ += it->second;
      ++delivered_msgs_;
      sink_(rec_, seq, now);
      ooo_.erase(it);
      it = ooo_.find(rcv_next_);
    }
  } else if (pkt.tseq > rcv_next_) {
    ooo_[pkt.tseq] = pkt.payload_bytes;
  }
  send_control(PacketKind::TcpAck, receiver_, sender_, rcv_next_, now);
}

void TcpConnection::on_ack(std::uint64_t ack, SimTime now) {
  if (phase_ != Phase::Established) return;
  if (ack > snd_next_) {
    throw std::logic_error("tcp ack beyond snd_next: flow " + std::to_string(rec_.id));
  }
  if (ack > snd_una_) {
    // RTT from the newest fully-acked never-retransmitted segment.
    bool have_sample = false;
    SimTime sample = 0;
    while (!rtx_queue_.empty() && rtx_queue_.front().off + rtx_queue_.front().len <= ack) {
      const SentSeg& seg = rtx_queue_.front();
      if (!seg.retransmitted) {
        sample = now - seg.first_tx;
        have_sample = true;
      }
      rtx_queue_.pop_front();
    }
    if (have_sample) update_rtt(sample);
    snd_una_ = ack;
    dup_acks_ = 0;
    if (cwnd_ < ssthresh_) {
      cwnd_ += p_.mss;
    } else {
      cwnd_ += std::max<std::uint64_t>(
          1, static_cast<std::uint64_t>(p_.mss) * p_.mss / cwnd_);
    }
    if (snd_una_ == snd_next_) {
      cancel_timer();
    } else {
      arm_timer(now + rto_);
    }
    trace("ack", now);
    try_transmit(now);
  } else if (ack == snd_una_ && snd_next_ > snd_una_) {
    ++dup_acks_;
    if (dup_acks_ == p_.dupack_threshold) {
      enter_loss_episode(now, /*timeout=*/false);
      send_segment(snd_una_, true, now);
      arm_timer(now + rto_);
    }
  }
}

}  // namespace twinsim
