#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>

#include "twinsim/flowrecord.hpp"
#include "twinsim/netstack.hpp"
#include "twinsim/packet.hpp"
#include "twinsim/scheduler.hpp"

namespace twinsim {

inline constexpr std::uint32_t kUdpHeaderBytes = 28;  // IP + UDP
inline constexpr std::uint32_t kTcpHeaderBytes = 40;  // IP + TCP

// Called when a message reaches the application in order.
using MessageSinkFn = std::function<void(FlowRecord&, std::uint32_t app_seq, SimTime now)>;

// Connectionless datagram service: one message, one packet, no recovery.
class UdpFlow {
 public:
  UdpFlow(Network& net, FlowRecord& rec) : net_(net), rec_(rec) {}

  void send(std::uint32_t app_seq, SimTime now);

 private:
  Network& net_;
  FlowRecord& rec_;
};

struct TcpParams {
  std::uint32_t mss = 1024;
  std::uint64_t initial_cwnd_segments = 1;
  std::uint64_t initial_ssthresh_segments = 64;
  SimTime min_rto = 200 * kNanosPerMilli;
  SimTime max_rto = 60 * kNanosPerSec;
  SimTime initial_rto = 1 * kNanosPerSec;
  int dupack_threshold = 3;
};

// Appends rows "t_s,flow_id,event,cwnd_bytes,ssthresh_bytes,rto_s,srtt_s".
class TcpTraceLog {
 public:
  TcpTraceLog() { text_ = "t_s,flow_id,event,cwnd_bytes,ssthresh_bytes,rto_s,srtt_s\n"; }
  void emit(SimTime t, FlowId flow, const char* event, std::uint64_t cwnd,
            std::uint64_t ssthresh, SimTime rto, SimTime srtt);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// Reliable in-order byte stream between one sender and one receiver node,
// message-oriented on MSS boundaries: three-way handshake, cumulative
// acks, fast retransmit on 3 duplicate acks, RTO with exponential
// backoff, slow start / congestion avoidance (Reno without recovery
// inflation), Karn-filtered RTT estimation.
class TcpConnection {
 public:
  enum class Phase : std::uint8_t { Closed, SynSent, SynReceived, Established };

  TcpConnection(Scheduler& sched, Network& net, FlowRecord& rec, NodeId sender,
                NodeId receiver, TcpParams params, MessageSinkFn sink,
                TcpTraceLog* trace = nullptr);

  void open(SimTime now);
  void app_send(SimTime now);  // enqueue one MSS-sized message
  void on_packet(NodeId at, const Packet& pkt, SimTime now);

  Phase sender_phase() const { return phase_; }
  Phase receiver_phase() const { return rphase_; }
  std::uint64_t cwnd() const { return cwnd_; }
  std::uint64_t ssthresh() const { return ssthresh_; }
  SimTime rto() const { return rto_; }
  SimTime srtt() const { return srtt_; }
  std::uint64_t snd_una() const { return snd_una_; }
  std::uint64_t snd_next() const { return snd_next_; }
  std::uint64_t bytes_buffered() const { return stream_end_ - snd_next_; }
  std::uint64_t delivered_messages() const { return delivered_msgs_; }
  int dup_acks() const { return dup_acks_; }

  // Feeds one RTT sample through the SRTT/RTTVAR estimator; exposed for
  // direct verification.
  SimTime update_rtt(SimTime sample);

 private:
  struct SentSeg {
    std::uint64_t off;
    std::uint32_t len;
    SimTime first_tx;
    bool retransmitted;
  };

  void try_transmit(SimTime now);
  void send_segment(std::uint64_t off, bool retransmission, SimTime now);
  void on_ack(std::uint64_t ack, SimTime now);
  void on_data(const Packet& pkt, SimTime now);
  void send_control(PacketKind kind, NodeId from, NodeId to, std::uint64_t tseq,
                    SimTime now);
  void enter_loss_episode(SimTime now, bool timeout);
  void arm_timer(SimTime at);
  void cancel_timer();
  void on_timer(SimTime now);
  void trace(const char* event, SimTime now);

  Scheduler& sched_;
  Network& net_;
  FlowRecord& rec_;
  NodeId sender_;
  NodeId receiver_;
  TcpParams p_;
  MessageSinkFn sink_;
  TcpTraceLog* trace_ = nullptr;

  // sender
  Phase phase_ = Phase::Closed;
  std::uint64_t stream_end_ = 0;  // bytes appended by the application
  std::uint64_t snd_una_ = 0;
  std::uint64_t snd_next_ = 0;
  std::uint64_t cwnd_ = 0;
  std::uint64_t ssthresh_ = 0;
  int dup_acks_ = 0;
  std::deque<SentSeg> rtx_queue_;
  bool syn_retransmitted_ = false;
  SimTime syn_tx_time_ = 0;

  // rtt estimator
  bool have_srtt_ = false;
  SimTime srtt_ = 0;
  SimTime rttvar_ = 0;
  SimTime rto_;

  // timer (lazy cancellation by generation)
  std::uint64_t timer_gen_ = 0;
  bool timer_armed_ = false;

  // receiver
  Phase rphase_ = Phase::Closed;
  std::uint64_t rcv_next_ = 0;
  std::map<std::uint64_t, std::uint32_t> ooo_;  // offset -> len
  std::uint64_t delivered_msgs_ = 0;
};

}  // namespace twinsim
