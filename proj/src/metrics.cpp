#include "twinsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace twinsim {

namespace {

std::vector<double> matched_delays_s(const FlowRecord& rec) {
  std::unordered_map<std::uint32_t, SimTime> sent_at;
  sent_at.reserve(rec.send_log.size());
  for (const auto& [seq, t] : rec.send_log) sent_at.emplace(seq, t);
  std::vector<double> delays;
  delays.reserve(rec.recv_log.size());
  for (const auto& [seq, t] : rec.recv_log) {
    const auto it = sent_at.find(seq);
    if (it == sent_at.end()) {
      throw std::logic_error("reception without matching send: flow " +
                             std::to_string(rec.id));
    }
    delays.push_back(ns_to_seconds(t - it->second));
  }
  return delays;
}

}  // namespace

std::optional<double> mean_delay_s(const FlowRecord& rec) {
  const auto delays = matched_delays_s(rec);
  if (delays.empty()) return std::nullopt;
  double sum = 0.0;
  for (double d : delays) sum += d;
  return sum / static_cast<double>(delays.size());
}

std::optional<double> mean_jitter_s(const FlowRecord& rec) {
  const auto delays = matched_delays_s(rec);
  if (delays.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = 1; i < delays.size(); ++i) {
    sum += std::abs(delays[i] - delays[i - 1]);
  }
  return sum / static_cast<double>(delays.size() - 1);
}

std::optional<double> loss_ratio(const FlowRecord& rec) {
  const std::uint64_t sent =
      rec.protocol == Protocol::Udp ? rec.send_log.size() : rec.scheduled;
  if (sent == 0) return std::nullopt;
  const double received = static_cast<double>(rec.recv_log.size());
  return 1.0 - received / static_cast<double>(sent);
}

Alignment twin_alignment_ratio(std::uint64_t received_count, double duration_s,
                               double fp_pps) {
  if (duration_s <= 0.0 || fp_pps <= 0.0) {
    throw std::runtime_error("alignment needs positive duration and fp");
  }
  const double fa = static_cast<double>(received_count) / duration_s;
  return Alignment{fa, fa / fp_pps};
}

FlowStats compute_flow_stats(const FlowRecord& rec, double duration_s) {
  FlowStats out;
  out.sent = rec.protocol == Protocol::Udp ? rec.send_log.size() : rec.scheduled;
  out.delivered = rec.recv_log.size();
  out.mean_delay_s = mean_delay_s(rec);
  out.mean_jitter_s = mean_jitter_s(rec);
  out.loss_ratio = loss_ratio(rec);
  out.fa_pps = static_cast<double>(out.delivered) / duration_s;
  if (rec.kind == FlowKind::Twin && rec.fp_pps > 0.0) {
    out.tau = twin_alignment_ratio(out.delivered, duration_s, rec.fp_pps).tau;
  }
  return out;
}

std::optional<Quartiles> quartiles(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto quantile = [&](double q) {
    if (n == 1) return values[0];
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  double sum = 0.0;
  for (double v : values) sum += v;
  Quartiles out{};
  out.mean = sum / static_cast<double>(n);
  out.min = values.front();
  out.q1 = quantile(0.25);
  out.median = quantile(0.5);
  out.q3 = quantile(0.75);
  out.max = values.back();
  out.n = n;
  return out;
}

}  // namespace twinsim
