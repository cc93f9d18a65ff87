#include "twinsim/flowrecord.hpp"

#include <stdexcept>

namespace twinsim {

const char* to_string(Protocol p) {
  return p == Protocol::Udp ? "udp" : "tcp";
}

Protocol protocol_from_string(const std::string& name) {
  if (name == "udp") return Protocol::Udp;
  if (name == "tcp") return Protocol::Tcp;
  throw std::runtime_error("unknown protocol: " + name);
}

const char* to_string(FlowKind k) {
  return k == FlowKind::Twin ? "twin" : "background";
}

const char* to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Data: return "data";
    case PacketKind::TcpSyn: return "syn";
    case PacketKind::TcpSynAck: return "synack";
    case PacketKind::TcpAckCtl: return "ackctl";
    case PacketKind::TcpAck: return "ack";
  }
  return "?";
}

FlowRecord& FlowTable::create(FlowKind kind, Protocol proto, double fp, NodeId src,
                              NodeId dst) {
  FlowRecord rec;
  rec.id = static_cast<FlowId>(records_.size());
  rec.kind = kind;
  rec.protocol = proto;
  rec.fp_pps = fp;
  rec.src = src;
  rec.dst = dst;
  records_.push_back(std::move(rec));
  return records_.back();
}

void FlowTable::on_emit(FlowId id) {
  FlowRecord& r = records_.at(id);
  ++r.wire_emitted;
  ++r.wire_in_flight;
}

void FlowTable::on_deliver(FlowId id) {
  FlowRecord& r = records_.at(id);
  ++r.wire_delivered;
  --r.wire_in_flight;
}

void FlowTable::on_drop(FlowId id, DropCause cause) {
  FlowRecord& r = records_.at(id);
  switch (cause) {
    case DropCause::Queue: ++r.drop_queue; break;
    case DropCause::WlanRetry: ++r.drop_wlan_retry; break;
    case DropCause::Injected: ++r.drop_injected; break;
  }
  --r.wire_in_flight;
}

void FlowTable::check_conservation() const {
  for (const FlowRecord& r : records_) {
    const std::int64_t balance =
        static_cast<std::int64_t>(r.wire_emitted) -
        static_cast<std::int64_t>(r.wire_delivered) -
        static_cast<std::int64_t>(r.drops_total());
    if (balance != r.wire_in_flight || r.wire_in_flight < 0) {
      throw std::logic_error(
          "packet conservation violated for flow " + std::to_string(r.id) +
          ": emitted=" + std::to_string(r.wire_emitted) +
          " delivered=" + std::to_string(r.wire_delivered) +
          " drops=" + std::to_string(r.drops_total()) +
          " in_flight=" + std::to_string(r.wire_in_flight));
    }
  }
}

}  // namespace twinsim
