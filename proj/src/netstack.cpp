#include "twinsim/netstack.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace twinsim {

namespace {

std::uint64_t pair_key(NodeId from, NodeId to) {
  return (static_cast<std::uint64_t>(from) << 32) | to;
}

constexpr SimTime kNever = std::numeric_limits<SimTime>::max();

}  // namespace

SimTime transmit_time_ns(std::int64_t wire_bytes, std::int64_t rate_bps) {
  if (rate_bps <= 0) throw std::logic_error("link rate must be positive");
  return wire_bytes * 8 * kNanosPerSec / rate_bps;
}

void TraceLog::emit(SimTime t, const char* ev, const Packet& p, const std::string& where) {
  text_ += "{\"t_ns\":";
  text_ += std::to_string(t);
  text_ += ",\"ev\":\"";
  text_ += ev;
  text_ += "\",\"flow\":";
  text_ += std::to_string(p.flow);
  text_ += ",\"uid\":";
  text_ += std::to_string(p.uid);
  text_ += ",\"kind\":\"";
  text_ += to_string(p.kind);
  text_ += "\",\"seq\":";
  text_ += std::to_string(p.app_seq);
  text_ += ",\"at\":\"";
  text_ += where;
  text_ += "\"}\n";
}

LinkChannel::LinkChannel(Scheduler& sched, NodeId from, NodeId to, const Link& link,
                         std::uint32_t frame_overhead_bytes)
    : sched_(sched),
      from_(from),
      to_(to),
      rate_bps_(link.rate_bps),
      prop_delay_(link.prop_delay_ns),
      capacity_(link.queue_capacity),
      frame_overhead_(frame_overhead_bytes) {}

bool LinkChannel::enqueue(const Packet& pkt, SimTime now) {
  if (in_system_ >= capacity_) {
    ++n_dropped_;
    if (drop_) drop_(pkt, DropCause::Queue);
    return false;
  }
  if (fault_rate_ > 0.0 && fault_rng_.uniform_real(0.0, 1.0) < fault_rate_) {
    ++n_dropped_;
    if (drop_) drop_(pkt, DropCause::Injected);
    return false;
  }
  ++n_enqueued_;
  ++in_system_;
  const std::int64_t wire_bytes =
      static_cast<std::int64_t>(pkt.payload_bytes) + pkt.header_bytes + frame_overhead_;
  const SimTime depart = std::max(now, busy_until_) + transmit_time_ns(wire_bytes, rate_bps_);
  busy_until_ = depart;
  sched_.schedule(depart, [this] {
    --in_system_;
    ++n_transmitted_;
  });
  sched_.schedule(depart + prop_delay_, [this, pkt] {
    if (deliver_) deliver_(pkt);
  });
  return true;
}

WlanChannel::WlanChannel(Scheduler& sched, const MacParams& mac,
                         std::size_t queue_capacity, std::uint64_t seed,
                         std::uint32_t wlan_index)
    : sched_(sched), mac_(mac), queue_capacity_(queue_capacity), seed_(seed),
      index_(wlan_index) {}

void WlanChannel::add_contender(NodeId node) {
  by_node_[node] = contenders_.size();
  Contender c;
  c.node = node;
  c.cw = mac_.cw_min;
  c.rng = RandomStream(seed_, "backoff/node" + std::to_string(node));
  contenders_.push_back(std::move(c));
}

WlanChannel::Contender& WlanChannel::contender(NodeId node) {
  auto it = by_node_.find(node);
  if (it == by_node_.end()) throw std::logic_error("node is not a WLAN member");
  return contenders_[it->second];
}

SimTime WlanChannel::airtime(const Packet& pkt) const {
  const std::int64_t wire_bytes = static_cast<std::int64_t>(pkt.payload_bytes) +
                                  pkt.header_bytes + mac_.frame_overhead_bytes;
  return transmit_time_ns(wire_bytes, mac_.phy_rate_bps);
}

// Fresh frame at the head of line: reset retry state and draw its backoff.
void WlanChannel::start_hol_frame(Contender& c) {
  c.retry = 0;
  c.cw = mac_.cw_min;
  c.backoff_slots = static_cast<int>(c.rng.uniform_int(static_cast<std::uint64_t>(c.cw)));
}

void WlanChannel::enqueue(NodeId from, NodeId to, const Packet& pkt, SimTime now) {
  Contender& c = contender(from);
  if (c.queue.size() >= queue_capacity_) {
    if (drop_) drop_(pkt, DropCause::Queue);
    return;
  }
  const bool was_empty = c.queue.empty();
  c.queue.push_back(Frame{pkt, to});
  if (was_empty) {
    start_hol_frame(c);
    if (!medium_busy_) {
      c.countdown_from = now + mac_.difs_ns;
      reschedule(now);
    }
  }
}

SimTime WlanChannel::attempt_time(const Contender& c) const {
  if (c.queue.empty() || c.countdown_from < 0) return kNever;
  return c.countdown_from + static_cast<SimTime>(c.backoff_slots) * mac_.slot_ns;
}

void WlanChannel::reschedule(SimTime now) {
  SimTime first = kNever;
  for (const Contender& c : contenders_) first = std::min(first, attempt_time(c));
  if (first == kNever) return;
  if (first < now) throw std::logic_error("WLAN attempt scheduled in the past");
  const std::uint64_t gen = ++attempt_gen_;
  sched_.schedule(first, [this, gen] {
    if (gen == attempt_gen_) on_attempt(sched_.now());
  });
}

void WlanChannel::on_attempt(SimTime now) {
  if (medium_busy_) return;
  std::vector<Contender*> transmitters;
  for (Contender& c : contenders_) {
    if (attempt_time(c) == now) transmitters.push_back(&c);
  }
  if (transmitters.empty()) return;

  // Everyone else freezes: whole slots elapsed so far are consumed, the
  // remainder of the backoff carries over to the next idle period.
  for (Contender& c : contenders_) {
    const SimTime at = attempt_time(c);
    if (at == kNever || at == now) continue;
    const auto consumed = static_cast<int>((now - c.countdown_from) / mac_.slot_ns);
    if (consumed > 0) c.backoff_slots -= std::min(consumed, c.backoff_slots);
    c.countdown_from = -1;
  }

  medium_busy_ = true;
  SimTime busy_end;
  if (transmitters.size() == 1) {
    Contender& s = *transmitters[0];
    Frame frame = std::move(s.queue.front());
    s.queue.pop_front();
    const SimTime air = airtime(frame.pkt);
    if (now < last_success_end_) {
      throw std::logic_error("overlapping successful WLAN transmissions");
    }
    last_success_end_ = now + air;
    busy_end = now + air + mac_.sifs_ns + transmit_time_ns(mac_.ack_bytes, mac_.phy_rate_bps);
    ++s.n_success;
    sched_.schedule(now + air, [this, to = frame.to, pkt = frame.pkt] {
      if (deliver_) deliver_(to, pkt);
    });
    if (!s.queue.empty()) start_hol_frame(s);
    s.countdown_from = -1;
  } else {
    ++n_collisions_;
    SimTime max_air = 0;
    for (Contender* t : transmitters) {
      max_air = std::max(max_air, airtime(t->queue.front().pkt));
    }
    busy_end = now + max_air;
    for (Contender* t : transmitters) {
      Contender& c = *t;
      ++c.retry;
      if (c.retry > mac_.retry_limit) {
        ++n_retry_drops_;
        Frame frame = std::move(c.queue.front());
        c.queue.pop_front();
        if (drop_) drop_(frame.pkt, DropCause::WlanRetry);
        if (!c.queue.empty()) start_hol_frame(c);
      } else {
        c.cw = std::min(2 * c.cw + 1, mac_.cw_max);
        c.backoff_slots =
            static_cast<int>(c.rng.uniform_int(static_cast<std::uint64_t>(c.cw)));
      }
      c.countdown_from = -1;
    }
  }
  sched_.schedule(busy_end, [this] { on_release(sched_.now()); });
}

void WlanChannel::on_release(SimTime now) {
  medium_busy_ = false;
  medium_free_at_ = now;
  for (Contender& c : contenders_) {
    if (!c.queue.empty()) c.countdown_from = now + mac_.difs_ns;
  }
  reschedule(now);
}

std::uint64_t WlanChannel::successes(NodeId node) const {
  auto it = by_node_.find(node);
  if (it == by_node_.end()) throw std::logic_error("node is not a WLAN member");
  return contenders_[it->second].n_success;
}

Network::Network(Scheduler& sched, const NetworkGraph& graph, const RoutingTable& routes,
                 const NetParams& params, FlowTable& flows, std::uint64_t seed)
    : sched_(sched), graph_(graph), routes_(routes), flows_(flows), params_(params) {
  auto drop_handler = [this](std::string where) {
    return [this, where = std::move(where)](const Packet& pkt, DropCause cause) {
      const char* cause_name = cause == DropCause::Queue        ? "queue"
                               : cause == DropCause::WlanRetry ? "wlan-retry"
                                                               : "injected";
      on_drop(pkt, cause, where + " cause=" + cause_name);
    };
  };

  for (const Link& link : graph.links) {
    for (int dir = 0; dir < 2; ++dir) {
      const NodeId from = dir == 0 ? link.a : link.b;
      const NodeId to = dir == 0 ? link.b : link.a;
      auto ch = std::make_unique<LinkChannel>(sched, from, to, link,
                                              params.wired_frame_overhead_bytes);
      ch->set_handlers(
          [this, to](const Packet& p) {
            Packet q = p;
            ++q.hops;
            arrive(to, q);
          },
          drop_handler("link " + std::to_string(from) + "->" + std::to_string(to)));
      if (params.fault_drop_rate > 0.0) {
        ch->set_fault_injection(
            params.fault_drop_rate,
            RandomStream(seed, "linkdrop/" + std::to_string(from) + "-" +
                                   std::to_string(to)));
      }
      channel_by_pair_[pair_key(from, to)] = ch.get();
      channels_.push_back(std::move(ch));
    }
  }

  for (std::size_t i = 0; i < graph.wlans.size(); ++i) {
    const Wlan& w = graph.wlans[i];
    auto wc = std::make_unique<WlanChannel>(sched, params.mac, params.mac_queue_capacity,
                                            seed, static_cast<std::uint32_t>(i));
    wc->add_contender(w.ap);
    for (NodeId sta : w.stations) wc->add_contender(sta);
    wc->set_handlers(
        [this](NodeId to, const Packet& p) {
          Packet q = p;
          ++q.hops;
          arrive(to, q);
        },
        drop_handler("wlan " + std::to_string(i)));
    for (NodeId sta : w.stations) {
      wlan_by_pair_[pair_key(w.ap, sta)] = wc.get();
      wlan_by_pair_[pair_key(sta, w.ap)] = wc.get();
    }
    wlans_.push_back(std::move(wc));
  }
}

LinkChannel& Network::channel(NodeId from, NodeId to) {
  auto it = channel_by_pair_.find(pair_key(from, to));
  if (it == channel_by_pair_.end()) throw std::logic_error("no such link channel");
  return *it->second;
}

void Network::inject(NodeId at, Packet pkt) {
  pkt.uid = next_uid_++;
  flows_.on_emit(pkt.flow);
  if (trace_) trace_->emit(sched_.now(), "send", pkt, "node " + std::to_string(at));
  if (at == pkt.dst) {
    arrive(at, pkt);
  } else {
    forward(at, pkt);
  }
}

void Network::forward(NodeId at, const Packet& pkt) {
  const NodeId next = routes_.next_hop(at, pkt.dst);
  const std::uint64_t key = pair_key(at, next);
  if (auto it = channel_by_pair_.find(key); it != channel_by_pair_.end()) {
    if (trace_) {
      trace_->emit(sched_.now(), "enqueue", pkt,
                   "link " + std::to_string(at) + "->" + std::to_string(next));
    }
    it->second->enqueue(pkt, sched_.now());
    return;
  }
  if (auto it = wlan_by_pair_.find(key); it != wlan_by_pair_.end()) {
    if (trace_) {
      trace_->emit(sched_.now(), "enqueue", pkt,
                   "wlan " + std::to_string(at) + "->" + std::to_string(next));
    }
    it->second->enqueue(at, next, pkt, sched_.now());
    return;
  }
  throw std::logic_error("next hop is not adjacent: " + std::to_string(at) + "->" +
                         std::to_string(next));
}

void Network::arrive(NodeId at, const Packet& pkt) {
  if (at == pkt.dst) {
    flows_.on_deliver(pkt.flow);
    if (trace_) trace_->emit(sched_.now(), "deliver", pkt, "node " + std::to_string(at));
    if (app_deliver_) app_deliver_(pkt, sched_.now());
    return;
  }
  forward(at, pkt);
}

void Network::on_drop(const Packet& pkt, DropCause cause, const std::string& where) {
  flows_.on_drop(pkt.flow, cause);
  if (trace_) trace_->emit(sched_.now(), "drop", pkt, where);
}

}  // namespace twinsim
