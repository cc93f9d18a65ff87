#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "twinsim/flowrecord.hpp"
#include "twinsim/packet.hpp"
#include "twinsim/rng.hpp"
#include "twinsim/scheduler.hpp"
#include "twinsim/topology.hpp"

namespace twinsim {

// 2.4 GHz DCF constants; overridable from the CLI.
struct MacParams {
  SimTime slot_ns = 20 * kNanosPerMicro;
  SimTime difs_ns = 50 * kNanosPerMicro;
  SimTime sifs_ns = 10 * kNanosPerMicro;
  int cw_min = 15;
  int cw_max = 1023;
  int retry_limit = 7;
  std::int64_t phy_rate_bps = 1'000'000;
  std::uint32_t frame_overhead_bytes = 34;  // per-frame MAC header
  std::uint32_t ack_bytes = 14;
};

struct NetParams {
  MacParams mac;
  std::uint32_t wired_frame_overhead_bytes = 14;
  std::size_t mac_queue_capacity = 100;  // per-contender MAC transmit queue
  double fault_drop_rate = 0.0;          // forced per-link drop injection (tests)
};

SimTime transmit_time_ns(std::int64_t wire_bytes, std::int64_t rate_bps);

// Line-delimited structured trace of send/enqueue/drop/deliver records.
class TraceLog {
 public:
  void emit(SimTime t, const char* ev, const Packet& p, const std::string& where);
  const std::string& text() const { return text_; }
  void clear() { text_.clear(); }

 private:
  std::string text_;
};

// One direction of a wired link: drop-tail FIFO in front of a serializer.
// Capacity counts packets in the system (waiting + in transmission).
class LinkChannel {
 public:
  using DeliverFn = std::function<void(const Packet&)>;
  using DropFn = std::function<void(const Packet&, DropCause)>;

  LinkChannel(Scheduler& sched, NodeId from, NodeId to, const Link& link,
              std::uint32_t frame_overhead_bytes);

  void set_handlers(DeliverFn deliver, DropFn drop) {
    deliver_ = std::move(deliver);
    drop_ = std::move(drop);
  }
  void set_fault_injection(double rate, RandomStream rng) {
    fault_rate_ = rate;
    fault_rng_ = std::move(rng);
  }

  // Departs at max(now, busy_until) + serialization, arrives prop_delay
  // later. Returns false when dropped.
  bool enqueue(const Packet& pkt, SimTime now);

  NodeId from() const { return from_; }
  NodeId to() const { return to_; }
  std::uint64_t enqueued() const { return n_enqueued_; }
  std::uint64_t dropped() const { return n_dropped_; }
  std::uint64_t transmitted() const { return n_transmitted_; }
  std::size_t in_system() const { return in_system_; }
  SimTime busy_until() const { return busy_until_; }

 private:
  Scheduler& sched_;
  NodeId from_;
  NodeId to_;
  std::int64_t rate_bps_;
  SimTime prop_delay_;
  std::size_t capacity_;
  std::uint32_t frame_overhead_;

  SimTime busy_until_ = 0;
  std::size_t in_system_ = 0;
  std::uint64_t n_enqueued_ = 0;
  std::uint64_t n_dropped_ = 0;
  std::uint64_t n_transmitted_ = 0;

  double fault_rate_ = 0.0;
  RandomStream fault_rng_;

  DeliverFn deliver_;
  DropFn drop_;
};

// Slotted CSMA/CA contention for one WLAN. Contenders are the AP plus
// the member stations; each owns a drop-tail MAC queue and binary
// exponential backoff state. Collisions happen when two contenders'
// attempt instants coincide; the colliding frames are lost and retried
// until the retry limit, which drops the packet as wireless loss.
// Distinct WLANs are distinct objects and never interact.
class WlanChannel {
 public:
  using DeliverFn = std::function<void(NodeId to, const Packet&)>;
  using DropFn = std::function<void(const Packet&, DropCause)>;

  WlanChannel(Scheduler& sched, const MacParams& mac, std::size_t queue_capacity,
              std::uint64_t seed, std::uint32_t wlan_index);

  void add_contender(NodeId node);
  void set_handlers(DeliverFn deliver, DropFn drop) {
    deliver_ = std::move(deliver);
    drop_ = std::move(drop);
  }

  // Hands a frame to `from`'s MAC queue for transmission to `to`.
  void enqueue(NodeId from, NodeId to, const Packet& pkt, SimTime now);

  std::uint64_t successes(NodeId node) const;
  std::uint64_t collisions() const { return n_collisions_; }
  std::uint64_t retry_drops() const { return n_retry_drops_; }
  SimTime last_success_end() const { return last_success_end_; }

 private:
  struct Frame {
    Packet pkt;
    NodeId to;
  };
  struct Contender {
    NodeId node;
    std::deque<Frame> queue;
    int backoff_slots = 0;
    int cw = 0;
    int retry = 0;
    SimTime countdown_from = -1;  // <0: frozen (medium busy) or idle
    RandomStream rng;
    std::uint64_t n_success = 0;
  };

  Contender& contender(NodeId node);
  void start_hol_frame(Contender& c);
  SimTime attempt_time(const Contender& c) const;
  void reschedule(SimTime now);
  void on_attempt(SimTime now);
  void on_release(SimTime now);
  SimTime airtime(const Packet& pkt) const;

  Scheduler& sched_;
  MacParams mac_;
  std::size_t queue_capacity_;
  std::uint64_t seed_;
  std::uint32_t index_;

  std::vector<Contender> contenders_;
  std::unordered_map<NodeId, std::size_t> by_node_;
  bool medium_busy_ = false;
  SimTime medium_free_at_ = 0;
  std::uint64_t attempt_gen_ = 0;
  std::uint64_t n_collisions_ = 0;
  std::uint64_t n_retry_drops_ = 0;
  SimTime last_success_end_ = 0;

  DeliverFn deliver_;
  DropFn drop_;
};

// Packet forwarding over a graph: owns both directions of every wired
// link and one WlanChannel per WLAN, looks up next hops, and hands
// packets that reached their destination node to the upper layer.
class Network {
 public:
  Network(Scheduler& sched, const NetworkGraph& graph, const RoutingTable& routes,
          const NetParams& params, FlowTable& flows, std::uint64_t seed);

  using AppDeliverFn = std::function<void(const Packet&, SimTime)>;
  void set_app_deliver(AppDeliverFn fn) { app_deliver_ = std::move(fn); }
  void set_trace(TraceLog* trace) { trace_ = trace; }

  // Entry point for transports: emits the packet at `at` and forwards it.
  void inject(NodeId at, Packet pkt);

  WlanChannel& wlan(std::size_t index) { return *wlans_.at(index); }
  LinkChannel& channel(NodeId from, NodeId to);
  const NetworkGraph& graph() const { return graph_; }

 private:
  void forward(NodeId at, const Packet& pkt);
  void arrive(NodeId at, const Packet& pkt);
  void on_drop(const Packet& pkt, DropCause cause, const std::string& where);

  Scheduler& sched_;
  const NetworkGraph& graph_;
  const RoutingTable& routes_;
  FlowTable& flows_;
  NetParams params_;

  std::vector<std::unique_ptr<LinkChannel>> channels_;
  std::unordered_map<std::uint64_t, LinkChannel*> channel_by_pair_;
  std::vector<std::unique_ptr<WlanChannel>> wlans_;
  std::unordered_map<std::uint64_t, WlanChannel*> wlan_by_pair_;

  AppDeliverFn app_deliver_;
  TraceLog* trace_ = nullptr;
  std::uint64_t next_uid_ = 0;
};

}  // namespace twinsim
