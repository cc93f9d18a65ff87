#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "twinsim/results.hpp"
#include "twinsim/scenario.hpp"
#include "twinsim/sweep.hpp"

namespace {

using namespace twinsim;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

struct ConfigFlags {
  std::string config_path;
  std::string scale;
  std::string protocol;
  double fp = 0;
  bool bt = false;
  std::uint64_t seed = 0;
  double duration = 0;
  std::size_t queue_capacity = 0;
  std::int64_t bg_rate = 0;
  double td_fraction = -1;
  std::int64_t mac_slot_us = 0, mac_difs_us = 0, mac_sifs_us = 0;
  int mac_cw_min = -1, mac_cw_max = -1, mac_retry_limit = -1;
  std::int64_t mac_phy_bps = 0;
  int mac_overhead = -1, mac_ack = -1;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_path, "scenario config JSON; flags override it");
  cmd->add_option("--scale", f.scale, "topology scale: small|middle|large");
  cmd->add_option("--protocol", f.protocol, "twin flow transport: udp|tcp");
  cmd->add_option("--fp", f.fp, "planned twinning frequency (packets/s)");
  cmd->add_option("--bt", f.bt, "background traffic on/off");
  cmd->add_option("--seed", f.seed, "run seed");
  cmd->add_option("--duration", f.duration, "simulated seconds");
  cmd->add_option("--queue-capacity", f.queue_capacity, "per-interface queue (packets)");
  cmd->add_option("--bg-rate-bps", f.bg_rate, "background on-period send rate");
  cmd->add_option("--td-fraction", f.td_fraction, "twinned-device fraction per WLAN");
  cmd->add_option("--mac-slot-us", f.mac_slot_us, "MAC slot time");
  cmd->add_option("--mac-difs-us", f.mac_difs_us, "MAC DIFS");
  cmd->add_option("--mac-sifs-us", f.mac_sifs_us, "MAC SIFS");
  cmd->add_option("--mac-cw-min", f.mac_cw_min, "MAC minimum contention window");
  cmd->add_option("--mac-cw-max", f.mac_cw_max, "MAC maximum contention window");
  cmd->add_option("--mac-retry-limit", f.mac_retry_limit, "MAC retry limit");
  cmd->add_option("--mac-phy-bps", f.mac_phy_bps, "WLAN PHY rate");
  cmd->add_option("--mac-overhead-bytes", f.mac_overhead, "per-frame MAC overhead");
  cmd->add_option("--mac-ack-bytes", f.mac_ack, "MAC ack frame size");
}

ScenarioConfig build_config(const CLI::App* cmd, const ConfigFlags& f) {
  ScenarioConfig c;
  if (!f.config_path.empty()) c = ScenarioConfig::from_json(read_file(f.config_path));
  if (cmd->count("--scale")) c.scale = scale_from_string(f.scale);
  if (cmd->count("--protocol")) c.protocol = protocol_from_string(f.protocol);
  if (cmd->count("--fp")) c.fp_pps = f.fp;
  if (cmd->count("--bt")) c.background_traffic = f.bt;
  if (cmd->count("--seed")) c.seed = f.seed;
  if (cmd->count("--duration")) c.duration_s = f.duration;
  if (cmd->count("--queue-capacity")) c.overrides.queue_capacity = f.queue_capacity;
  if (cmd->count("--bg-rate-bps")) c.overrides.background_rate_bps = f.bg_rate;
  if (cmd->count("--td-fraction")) c.overrides.td_fraction = f.td_fraction;
  MacParams& m = c.overrides.mac;
  if (cmd->count("--mac-slot-us")) m.slot_ns = f.mac_slot_us * kNanosPerMicro;
  if (cmd->count("--mac-difs-us")) m.difs_ns = f.mac_difs_us * kNanosPerMicro;
  if (cmd->count("--mac-sifs-us")) m.sifs_ns = f.mac_sifs_us * kNanosPerMicro;
  if (cmd->count("--mac-cw-min")) m.cw_min = f.mac_cw_min;
  if (cmd->count("--mac-cw-max")) m.cw_max = f.mac_cw_max;
  if (cmd->count("--mac-retry-limit")) m.retry_limit = f.mac_retry_limit;
  if (cmd->count("--mac-phy-bps")) m.phy_rate_bps = f.mac_phy_bps;
  if (cmd->count("--mac-overhead-bytes")) m.frame_overhead_bytes = f.mac_overhead;
  if (cmd->count("--mac-ack-bytes")) m.ack_bytes = f.mac_ack;
  return c;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  // "1-5" or "1,2,3"
  std::vector<std::uint64_t> out;
  const auto dash = text.find('-');
  if (dash != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dash));
    const auto hi = std::stoull(text.substr(dash + 1));
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

int cmd_run(const CLI::App* cmd, const ConfigFlags& flags, const std::string& out_dir,
            const std::string& trace_path, const std::string& tcp_trace_path,
            const std::string& topo_path) {
  const ScenarioConfig config = build_config(cmd, flags);
  config.validate();

  std::string packet_trace, tcp_trace, topo_dump;
  RunOutputs outputs;
  if (!trace_path.empty()) outputs.packet_trace = &packet_trace;
  if (!tcp_trace_path.empty()) outputs.tcp_trace = &tcp_trace;
  if (!topo_path.empty()) outputs.topology_dump = &topo_dump;

  RunOutcome outcome;
  outcome.config = config;
  outcome.result = run_scenario(config, &outputs);

  write_results(out_dir, {outcome});
  if (!trace_path.empty()) write_file(trace_path, packet_trace);
  if (!tcp_trace_path.empty()) write_file(tcp_trace_path, tcp_trace);
  if (!topo_path.empty()) write_file(topo_path, topo_dump);

  std::cout << "scenario " << config.scenario_id() << ": " << outcome.result->flows.size()
            << " flows -> " << out_dir << "\n";
  return 0;
}

int cmd_sweep(const CLI::App* cmd, const ConfigFlags& flags, const std::string& out_dir,
              const std::string& scales, const std::string& protocols,
              const std::string& fps, const std::string& bt_mode,
              const std::string& seeds, unsigned jobs) {
  const ScenarioConfig base = build_config(cmd, flags);

  SweepAxes axes = SweepAxes::paper_matrix();
  if (cmd->count("--scales")) {
    axes.scales.clear();
    std::stringstream ss(scales);
    std::string item;
    while (std::getline(ss, item, ',')) axes.scales.push_back(scale_from_string(item));
  }
  if (cmd->count("--protocols")) {
    axes.protocols.clear();
    std::stringstream ss(protocols);
    std::string item;
    while (std::getline(ss, item, ',')) axes.protocols.push_back(protocol_from_string(item));
  }
  if (cmd->count("--fp-list")) {
    axes.fp_values.clear();
    std::stringstream ss(fps);
    std::string item;
    while (std::getline(ss, item, ',')) axes.fp_values.push_back(std::stod(item));
  }
  if (cmd->count("--bt-mode")) {
    if (bt_mode == "both") {
      axes.background = {false, true};
    } else if (bt_mode == "on") {
      axes.background = {true};
    } else if (bt_mode == "off") {
      axes.background = {false};
    } else {
      throw std::runtime_error("--bt-mode must be both|on|off");
    }
  }
  if (cmd->count("--seeds")) axes.seeds = parse_seeds(seeds);

  const std::vector<ScenarioConfig> configs = expand_axes(base, axes);
  if (configs.empty()) throw std::runtime_error("sweep axes are empty");
  const std::vector<RunOutcome> outcomes = run_sweep(configs, jobs);
  const int failures = write_results(out_dir, outcomes);

  std::cout << configs.size() << " runs -> " << out_dir;
  if (failures > 0) std::cout << " (" << failures << " failed; see manifest.json)";
  std::cout << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twinsim: packet-level simulator for digital-twin synchronization traffic"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute one scenario");
  ConfigFlags run_flags;
  add_config_flags(run, run_flags);
  std::string run_out = "results";
  std::string trace_path, tcp_trace_path, run_topo_path;
  run->add_option("--out", run_out, "output directory");
  run->add_option("--trace", trace_path, "write per-packet event trace here");
  run->add_option("--tcp-trace", tcp_trace_path, "write per-connection cwnd/rto CSV here");
  run->add_option("--dump-topology", run_topo_path, "write topology JSON here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "execute an experiment matrix");
  ConfigFlags sweep_flags;
  add_config_flags(sweep, sweep_flags);
  std::string sweep_out = "sweep-results";
  std::string scales, protocols, fps, bt_mode, seeds;
  unsigned jobs = std::thread::hardware_concurrency();
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--scales", scales, "comma list (default small,middle,large)");
  sweep->add_option("--protocols", protocols, "comma list (default udp,tcp)");
  sweep->add_option("--fp-list", fps, "comma list (default 0.5,1,2,5,10)");
  sweep->add_option("--bt-mode", bt_mode, "both|on|off (default both)");
  sweep->add_option("--seeds", seeds, "range 1-5 or comma list (default 1-5)");
  sweep->add_option("--jobs", jobs, "concurrent runs");

  // topo
  auto* topo = app.add_subcommand("topo", "dump a preset topology as JSON");
  std::string topo_scale = "small";
  std::string topo_out;
  topo->add_option("--scale", topo_scale, "small|middle|large");
  topo->add_option("--out", topo_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run, run_flags, run_out, trace_path, tcp_trace_path, run_topo_path);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep, sweep_flags, sweep_out, scales, protocols, fps, bt_mode,
                       seeds, jobs);
    }
    if (topo->parsed()) {
      using namespace twinsim;
      const NetworkGraph graph = build_topology(scale_from_string(topo_scale));
      const RoutingTable routes = RoutingTable::compute(graph);
      const std::string text = topology_json(graph, routes);
      if (topo_out.empty()) {
        std::cout << text << "\n";
      } else {
        write_file(topo_out, text);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
