#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twinsim/apps.hpp"
#include "twinsim/flowrecord.hpp"
#include "twinsim/metrics.hpp"
#include "twinsim/netstack.hpp"
#include "twinsim/scheduler.hpp"
#include "twinsim/topology.hpp"
#include "twinsim/transport.hpp"

namespace twinsim {

inline constexpr const char* kToolName = "twinsim";
inline constexpr const char* kToolVersion = "0.1.0";

struct OverrideParams {
  std::size_t queue_capacity = 100;
  std::int64_t background_rate_bps = 100'000;
  double td_fraction = 0.5;
  MacParams mac;

  bool operator==(const OverrideParams&) const = default;
};

struct ScenarioConfig {
  TopologyScale scale = TopologyScale::Small;
  Protocol protocol = Protocol::Udp;
  double fp_pps = 1.0;
  bool background_traffic = false;
  double duration_s = 20.0;
  std::uint64_t seed = 1;
  OverrideParams overrides;

  bool operator==(const ScenarioConfig&) const = default;

  void validate() const;  // throws std::runtime_error with a description
  std::string scenario_id() const;
  std::string to_json() const;
  static ScenarioConfig from_json(const std::string& text);
  std::uint64_t config_hash() const;  // over the canonical json form
  std::string config_hash_hex() const;
};

// Owns one simulation run: engine, network, transports, apps, flow
// records. Tests may assemble arbitrary graphs and flows through it;
// run_scenario() layers the preset experiment on top.
class Simulation {
 public:
  Simulation(const NetworkGraph& graph, const RoutingTable& routes,
             const NetParams& params, std::uint64_t seed);
  ~Simulation();

  FlowId add_twin_flow(NodeId station, NodeId dt, Protocol proto, double fp_pps,
                       SimTime duration);
  FlowId add_background_flow(NodeId server, NodeId user, std::int64_t rate_bps,
                             SimTime duration);

  void enable_trace() { net_->set_trace(&trace_); }
  const TraceLog& trace() const { return trace_; }
  TcpTraceLog& tcp_trace() { return tcp_trace_; }
  void enable_tcp_trace() { tcp_trace_enabled_ = true; }

  // Executes the run and checks per-flow packet conservation.
  void run(SimTime duration);

  Scheduler& scheduler() { return sched_; }
  Network& network() { return *net_; }
  FlowTable& flows() { return flows_; }
  const FlowTable& flows() const { return flows_; }
  TcpConnection& tcp_connection(FlowId id);

 private:
  void dispatch(const Packet& pkt, SimTime now);

  Scheduler sched_;
  const NetworkGraph& graph_;
  const RoutingTable& routes_;
  std::uint64_t seed_;
  FlowTable flows_;
  std::unique_ptr<Network> net_;
  TraceLog trace_;
  TcpTraceLog tcp_trace_;
  bool tcp_trace_enabled_ = false;
  TcpParams tcp_params_;

  std::vector<std::unique_ptr<UdpFlow>> udp_flows_;           // by flow id
  std::vector<std::unique_ptr<TcpConnection>> tcp_conns_;     // by flow id
  std::vector<std::unique_ptr<TwinApp>> twin_apps_;
  std::vector<std::unique_ptr<OnOffApp>> onoff_apps_;
};

struct FlowRow {
  FlowId flow_id;
  FlowKind kind;
  FlowStats stats;
};

struct AggregateRow {
  std::size_t twin_flows = 0;
  std::optional<Quartiles> delay;
  std::optional<Quartiles> jitter;
  std::optional<Quartiles> loss;
  std::optional<Quartiles> tau;
};

struct ResultSet {
  ScenarioConfig config;
  std::string config_hash;
  std::vector<FlowRow> flows;
  AggregateRow aggregate;
};

struct RunOutputs {
  std::string* packet_trace = nullptr;   // line-delimited records
  std::string* tcp_trace = nullptr;      // cwnd/ssthresh/rto csv
  std::string* topology_dump = nullptr;  // json
};

AggregateRow aggregate_twin_flows(const std::vector<FlowRow>& rows);

// Builds the preset topology, assigns stations, wires the apps for the
// configured protocol and background flag, runs for the configured
// duration, and computes every per-flow metric. Deterministic per
// (config, seed).
ResultSet run_scenario(const ScenarioConfig& config, const RunOutputs* outputs = nullptr);

}  // namespace twinsim
