#pragma once

#include <cstdint>

#include "twinsim/time.hpp"
#include "twinsim/topology.hpp"

namespace twinsim {

using FlowId = std::uint32_t;

enum class PacketKind : std::uint8_t { Data, TcpSyn, TcpSynAck, TcpAckCtl, TcpAck };

const char* to_string(PacketKind kind);

struct Packet {
  FlowId flow = 0;
  PacketKind kind = PacketKind::Data;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t app_seq = 0;   // message index within the flow (data only)
  std::uint64_t tseq = 0;      // TCP: data byte offset, or cumulative ack
  std::uint32_t payload_bytes = 0;
  std::uint32_t header_bytes = 0;  // network + transport headers
  SimTime created_at = 0;
  bool retransmission = false;
  std::uint64_t uid = 0;       // trace identity, set on inject
  std::uint32_t hops = 0;      // channels traversed so far
};

}  // namespace twinsim
