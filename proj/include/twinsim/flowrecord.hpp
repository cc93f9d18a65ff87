#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twinsim/packet.hpp"
#include "twinsim/time.hpp"
#include "twinsim/topology.hpp"

namespace twinsim {

enum class Protocol : std::uint8_t { Udp, Tcp };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& name);

enum class FlowKind : std::uint8_t { Twin, Background };

const char* to_string(FlowKind k);

enum class DropCause : std::uint8_t { Queue, WlanRetry, Injected };

// Per-flow trace and counters; everything the metrics are computed from.
// Send log entries are stamped at a message's first wire transmission,
// receive log entries at in-order delivery to the application.
struct FlowRecord {
  FlowId id = 0;
  FlowKind kind = FlowKind::Twin;
  Protocol protocol = Protocol::Udp;
  double fp_pps = 0.0;  // planned frequency; 0 for background flows
  NodeId src = 0;
  NodeId dst = 0;

  std::uint64_t scheduled = 0;  // app messages handed to the transport
  std::vector<std::pair<std::uint32_t, SimTime>> send_log;
  std::vector<std::pair<std::uint32_t, SimTime>> recv_log;

  // Wire-level conservation counters over every packet of the flow,
  // acks and handshake segments included.
  std::uint64_t wire_emitted = 0;
  std::uint64_t wire_delivered = 0;
  std::uint64_t drop_queue = 0;
  std::uint64_t drop_wlan_retry = 0;
  std::uint64_t drop_injected = 0;
  std::int64_t wire_in_flight = 0;

  std::int64_t last_recv_seq = -1;

  std::uint64_t drops_total() const {
    return drop_queue + drop_wlan_retry + drop_injected;
  }
};

class FlowTable {
 public:
  FlowRecord& create(FlowKind kind, Protocol proto, double fp, NodeId src, NodeId dst);
  FlowRecord& at(FlowId id) { return records_.at(id); }
  const FlowRecord& at(FlowId id) const { return records_.at(id); }
  std::size_t size() const { return records_.size(); }
  std::vector<FlowRecord>& records() { return records_; }
  const std::vector<FlowRecord>& records() const { return records_; }

  void on_emit(FlowId id);
  void on_deliver(FlowId id);
  void on_drop(FlowId id, DropCause cause);

  // sent == delivered + drops-by-cause + in-flight, per flow; throws
  // std::logic_error naming the first violating flow.
  void check_conservation() const;

 private:
  std::vector<FlowRecord> records_;
};

}  // namespace twinsim
