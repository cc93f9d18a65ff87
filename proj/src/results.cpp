#include "twinsim/results.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace twinsim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

void append_quartiles(std::string& out, const std::optional<Quartiles>& q) {
  for (int i = 0; i < 6; ++i) {
    out += ',';
    if (q) {
      const double v = i == 0   ? q->mean
                       : i == 1 ? q->min
                       : i == 2 ? q->q1
                       : i == 3 ? q->median
                       : i == 4 ? q->q3
                                : q->max;
      out += fmt(v);
    }
  }
}

std::string scenario_prefix(const ScenarioConfig& c) {
  std::string out = c.scenario_id();
  out += ',';
  out += to_string(c.scale);
  out += ',';
  out += to_string(c.protocol);
  out += ',';
  out += fmt(c.fp_pps);
  out += ',';
  out += c.background_traffic ? '1' : '0';
  out += ',';
  out += std::to_string(c.seed);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

const std::string& flows_csv_header() {
  static const std::string header =
      "scenario_id,scale,protocol,fp_pps,bt,seed,flow_id,flow_kind,sent,delivered,"
      "mean_delay_s,mean_jitter_s,loss_ratio,fa_pps,tau\n";
  return header;
}

const std::string& aggregates_csv_header() {
  static const std::string header =
      "scenario_id,scale,protocol,fp_pps,bt,seed,twin_flows,"
      "delay_mean_s,delay_min_s,delay_q1_s,delay_median_s,delay_q3_s,delay_max_s,"
      "jitter_mean_s,jitter_min_s,jitter_q1_s,jitter_median_s,jitter_q3_s,jitter_max_s,"
      "loss_mean,loss_min,loss_q1,loss_median,loss_q3,loss_max,"
      "tau_mean,tau_min,tau_q1,tau_median,tau_q3,tau_max\n";
  return header;
}

std::string flows_csv(const std::vector<RunOutcome>& outcomes) {
  std::string out = flows_csv_header();
  for (const RunOutcome& run : outcomes) {
    if (!run.result) continue;
    const std::string prefix = scenario_prefix(run.config);
    for (const FlowRow& row : run.result->flows) {
      out += prefix;
      out += ',';
      out += std::to_string(row.flow_id);
      out += ',';
      out += to_string(row.kind);
      out += ',';
      out += std::to_string(row.stats.sent);
      out += ',';
      out += std::to_string(row.stats.delivered);
      out += ',';
      out += fmt_opt(row.stats.mean_delay_s);
      out += ',';
      out += fmt_opt(row.stats.mean_jitter_s);
      out += ',';
      out += fmt_opt(row.stats.loss_ratio);
      out += ',';
      out += fmt(row.stats.fa_pps);
      out += ',';
      out += fmt_opt(row.stats.tau);
      out += '\n';
    }
  }
  return out;
}

std::string aggregates_csv(const std::vector<RunOutcome>& outcomes) {
  std::string out = aggregates_csv_header();
  for (const RunOutcome& run : outcomes) {
    if (!run.result) continue;
    out += scenario_prefix(run.config);
    out += ',';
    out += std::to_string(run.result->aggregate.twin_flows);
    append_quartiles(out, run.result->aggregate.delay);
    append_quartiles(out, run.result->aggregate.jitter);
    append_quartiles(out, run.result->aggregate.loss);
    append_quartiles(out, run.result->aggregate.tau);
    out += '\n';
  }
  return out;
}

std::string manifest_json(const std::vector<RunOutcome>& outcomes) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["runs"] = nlohmann::json::array();
  for (const RunOutcome& run : outcomes) {
    nlohmann::json r;
    r["scenario_id"] = run.config.scenario_id();
    r["config"] = nlohmann::json::parse(run.config.to_json());
    r["config_hash"] = run.config.config_hash_hex();
    r["status"] = run.result ? "ok" : "failed";
    if (run.result) {
      r["flows"] = run.result->flows.size();
    } else {
      r["error"] = run.error;
    }
    j["runs"].push_back(std::move(r));
  }
  return j.dump(2);
}

int write_results(const std::filesystem::path& dir,
                  const std::vector<RunOutcome>& outcomes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output dir " + dir.string() + ": " +
                                   ec.message());
  write_file(dir / "flows.csv", flows_csv(outcomes));
  write_file(dir / "aggregates.csv", aggregates_csv(outcomes));
  write_file(dir / "manifest.json", manifest_json(outcomes));
  int failures = 0;
  for (const RunOutcome& run : outcomes) {
    if (!run.result) ++failures;
  }
  return failures;
}

}  // namespace twinsim
