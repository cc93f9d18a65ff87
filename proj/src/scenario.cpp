#include "twinsim/scenario.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace twinsim {

namespace {

std::string format_fp(double fp) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", fp);
  return buf;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (fp_pps <= 0.0) throw std::runtime_error("config: fp_pps must be positive");
  if (duration_s <= 0.0) throw std::runtime_error("config: duration_s must be positive");
  if (overrides.td_fraction < 0.0 || overrides.td_fraction > 1.0) {
    throw std::runtime_error("config: td_fraction must lie in [0, 1]");
  }
  if (overrides.queue_capacity == 0) {
    throw std::runtime_error("config: queue_capacity must be positive");
  }
  if (overrides.background_rate_bps <= 0) {
    throw std::runtime_error("config: background_rate_bps must be positive");
  }
  const MacParams& m = overrides.mac;
  if (m.slot_ns <= 0 || m.difs_ns < 0 || m.sifs_ns < 0) {
    throw std::runtime_error("config: MAC timing must be positive");
  }
  if (m.cw_min < 0 || m.cw_max < m.cw_min || m.retry_limit < 0) {
    throw std::runtime_error("config: MAC contention window is malformed");
  }
  if (m.phy_rate_bps <= 0) throw std::runtime_error("config: MAC phy rate must be positive");
}

std::string ScenarioConfig::scenario_id() const {
  std::string id = to_string(scale);
  id += "-";
  id += to_string(protocol);
  id += "-fp";
  id += format_fp(fp_pps);
  id += background_traffic ? "-bt1" : "-bt0";
  id += "-seed";
  id += std::to_string(seed);
  return id;
}

std::string ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["scale"] = to_string(scale);
  j["protocol"] = to_string(protocol);
  j["fp_pps"] = fp_pps;
  j["background_traffic"] = background_traffic;
  j["duration_s"] = duration_s;
  j["seed"] = seed;
  nlohmann::json o;
  o["queue_capacity"] = overrides.queue_capacity;
  o["background_rate_bps"] = overrides.background_rate_bps;
  o["td_fraction"] = overrides.td_fraction;
  nlohmann::json m;
  m["slot_us"] = overrides.mac.slot_ns / kNanosPerMicro;
  m["difs_us"] = overrides.mac.difs_ns / kNanosPerMicro;
  m["sifs_us"] = overrides.mac.sifs_ns / kNanosPerMicro;
  m["cw_min"] = overrides.mac.cw_min;
  m["cw_max"] = overrides.mac.cw_max;
  m["retry_limit"] = overrides.mac.retry_limit;
  m["phy_rate_bps"] = overrides.mac.phy_rate_bps;
  m["frame_overhead_bytes"] = overrides.mac.frame_overhead_bytes;
  m["ack_bytes"] = overrides.mac.ack_bytes;
  o["mac"] = std::move(m);
  j["overrides"] = std::move(o);
  return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ScenarioConfig c;
  c.scale = scale_from_string(j.at("scale").get<std::string>());
  c.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  c.fp_pps = j.at("fp_pps").get<double>();
  c.background_traffic = j.at("background_traffic").get<bool>();
  c.duration_s = j.at("duration_s").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("overrides")) {
    const auto& o = j.at("overrides");
    if (o.contains("queue_capacity")) c.overrides.queue_capacity = o.at("queue_capacity").get<std::size_t>();
    if (o.contains("background_rate_bps")) {
      c.overrides.background_rate_bps = o.at("background_rate_bps").get<std::int64_t>();
    }
    if (o.contains("td_fraction")) c.overrides.td_fraction = o.at("td_fraction").get<double>();
    if (o.contains("mac")) {
      const auto& m = o.at("mac");
      MacParams& mac = c.overrides.mac;
      if (m.contains("slot_us")) mac.slot_ns = m.at("slot_us").get<SimTime>() * kNanosPerMicro;
      if (m.contains("difs_us")) mac.difs_ns = m.at("difs_us").get<SimTime>() * kNanosPerMicro;
      if (m.contains("sifs_us")) mac.sifs_ns = m.at("sifs_us").get<SimTime>() * kNanosPerMicro;
      if (m.contains("cw_min")) mac.cw_min = m.at("cw_min").get<int>();
      if (m.contains("cw_max")) mac.cw_max = m.at("cw_max").get<int>();
      if (m.contains("retry_limit")) mac.retry_limit = m.at("retry_limit").get<int>();
      if (m.contains("phy_rate_bps")) mac.phy_rate_bps = m.at("phy_rate_bps").get<std::int64_t>();
      if (m.contains("frame_overhead_bytes")) {
        mac.frame_overhead_bytes = m.at("frame_overhead_bytes").get<std::uint32_t>();
      }
      if (m.contains("ack_bytes")) mac.ack_bytes = m.at("ack_bytes").get<std::uint32_t>();
    }
  }
  return c;
}

std::uint64_t ScenarioConfig::config_hash() const {
  // nlohmann's object keys are sorted, so the dump is canonical.
  return fnv1a64(to_json());
}

std::string ScenarioConfig::config_hash_hex() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, config_hash());
  return buf;
}

Simulation::Simulation(const NetworkGraph& graph, const RoutingTable& routes,
                       const NetParams& params, std::uint64_t seed)
    : graph_(graph), routes_(routes), seed_(seed) {
  net_ = std::make_unique<Network>(sched_, graph, routes, params, flows_, seed);
  net_->set_app_deliver([this](const Packet& pkt, SimTime now) { dispatch(pkt, now); });
}

Simulation::~Simulation() = default;

void Simulation::dispatch(const Packet& pkt, SimTime now) {
  if (pkt.flow < tcp_conns_.size() && tcp_conns_[pkt.flow]) {
    tcp_conns_[pkt.flow]->on_packet(pkt.dst, pkt, now);
    return;
  }
  // UDP: a delivered datagram is an in-order app message.
  DtSink::record(flows_.at(pkt.flow), pkt.app_seq, now);
}

TcpConnection& Simulation::tcp_connection(FlowId id) {
  if (id >= tcp_conns_.size() || !tcp_conns_[id]) {
    throw std::logic_error("flow has no tcp connection");
  }
  return *tcp_conns_[id];
}

FlowId Simulation::add_twin_flow(NodeId station, NodeId dt, Protocol proto,
                                 double fp_pps, SimTime duration) {
  FlowRecord& rec = flows_.create(FlowKind::Twin, proto, fp_pps, station, dt);
  udp_flows_.resize(flows_.size());
  tcp_conns_.resize(flows_.size());
  if (proto == Protocol::Udp) {
    udp_flows_[rec.id] = std::make_unique<UdpFlow>(*net_, rec);
    twin_apps_.push_back(std::make_unique<TwinApp>(sched_, udp_flows_[rec.id].get(),
                                                   nullptr, fp_pps, duration));
  } else {
    tcp_conns_[rec.id] = std::make_unique<TcpConnection>(
        sched_, *net_, rec, station, dt, tcp_params_, DtSink::record,
        tcp_trace_enabled_ ? &tcp_trace_ : nullptr);
    TcpConnection* conn = tcp_conns_[rec.id].get();
    sched_.schedule(0, [conn, this] { conn->open(sched_.now()); });
    twin_apps_.push_back(
        std::make_unique<TwinApp>(sched_, nullptr, conn, fp_pps, duration));
  }
  twin_apps_.back()->start();
  return rec.id;
}

FlowId Simulation::add_background_flow(NodeId server, NodeId user,
                                       std::int64_t rate_bps, SimTime duration) {
  FlowRecord& rec = flows_.create(FlowKind::Background, Protocol::Tcp, 0.0, server, user);
  udp_flows_.resize(flows_.size());
  tcp_conns_.resize(flows_.size());
  tcp_conns_[rec.id] = std::make_unique<TcpConnection>(
      sched_, *net_, rec, server, user, tcp_params_, DtSink::record,
      tcp_trace_enabled_ ? &tcp_trace_ : nullptr);
  TcpConnection* conn = tcp_conns_[rec.id].get();
  RandomStream rng(seed_, "onoff/sta" + std::to_string(user));
  onoff_apps_.push_back(
      std::make_unique<OnOffApp>(sched_, *conn, std::move(rng), rate_bps, duration));
  OnOffApp* app = onoff_apps_.back().get();
  sched_.schedule(0, [conn, app, this] {
    conn->open(sched_.now());
    app->start(sched_.now());
  });
  return rec.id;
}

void Simulation::run(SimTime duration) {
  sched_.run_until(duration);
  flows_.check_conservation();
}

AggregateRow aggregate_twin_flows(const std::vector<FlowRow>& rows) {
  AggregateRow agg;
  std::vector<double> delays, jitters, losses, taus;
  for (const FlowRow& row : rows) {
    if (row.kind != FlowKind::Twin) continue;
    ++agg.twin_flows;
    if (row.stats.mean_delay_s) delays.push_back(*row.stats.mean_delay_s);
    if (row.stats.mean_jitter_s) jitters.push_back(*row.stats.mean_jitter_s);
    if (row.stats.loss_ratio) losses.push_back(*row.stats.loss_ratio);
    if (row.stats.tau) taus.push_back(*row.stats.tau);
  }
  agg.delay = quartiles(std::move(delays));
  agg.jitter = quartiles(std::move(jitters));
  agg.loss = quartiles(std::move(losses));
  agg.tau = quartiles(std::move(taus));
  return agg;
}

ResultSet run_scenario(const ScenarioConfig& config, const RunOutputs* outputs) {
  config.validate();

  TopologyParams topo_params;
  topo_params.queue_capacity = config.overrides.queue_capacity;
  const NetworkGraph graph = build_topology(config.scale, topo_params);
  const RoutingTable routes = RoutingTable::compute(graph);

  RandomStream assign_rng(config.seed, "assign");
  const StationAssignment assignment =
      assign_stations(graph, config.overrides.td_fraction, assign_rng);

  NetParams net_params;
  net_params.mac = config.overrides.mac;
  net_params.mac_queue_capacity = config.overrides.queue_capacity;

  Simulation sim(graph, routes, net_params, config.seed);
  if (outputs && outputs->packet_trace) sim.enable_trace();
  if (outputs && outputs->tcp_trace) sim.enable_tcp_trace();

  const SimTime duration = seconds_to_ns(config.duration_s);
  const NodeId dt = graph.dt_server();
  for (NodeId sta : assignment.twinned) {
    sim.add_twin_flow(sta, dt, config.protocol, config.fp_pps, duration);
  }
  if (config.background_traffic) {
    for (NodeId sta : assignment.end_users) {
      sim.add_background_flow(dt, sta, config.overrides.background_rate_bps, duration);
    }
  }

  sim.run(duration);

  ResultSet result;
  result.config = config;
  result.config_hash = config.config_hash_hex();
  for (const FlowRecord& rec : sim.flows().records()) {
    result.flows.push_back(
        FlowRow{rec.id, rec.kind, compute_flow_stats(rec, config.duration_s)});
  }
  result.aggregate = aggregate_twin_flows(result.flows);

  if (outputs) {
    if (outputs->packet_trace) *outputs->packet_trace = sim.trace().text();
    if (outputs->tcp_trace) *outputs->tcp_trace = sim.tcp_trace().text();
    if (outputs->topology_dump) *outputs->topology_dump = topology_json(graph, routes);
  }
  return result;
}

}  // namespace twinsim
