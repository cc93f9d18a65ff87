#include "twinsim/apps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twinsim {

std::vector<SimTime> twin_schedule(double fp_pps, SimTime duration) {
  if (fp_pps <= 0.0) throw std::runtime_error("planned frequency must be positive");
  if (duration <= 0) throw std::runtime_error("duration must be positive");
  std::vector<SimTime> epochs;
  for (std::uint64_t k = 0;; ++k) {
    const auto t = static_cast<SimTime>(
        std::llround(static_cast<double>(k) * 1e9 / fp_pps));
    if (t >= duration) break;
    epochs.push_back(t);
  }
  return epochs;
}

TwinApp::TwinApp(Scheduler& sched, UdpFlow* udp, TcpConnection* tcp, double fp_pps,
                 SimTime duration)
    : sched_(sched), udp_(udp), tcp_(tcp), epochs_(twin_schedule(fp_pps, duration)) {}

void TwinApp::start() {
  if (epochs_.empty()) return;
  sched_.schedule(epochs_[0], [this] { fire(sched_.now()); });
}

void TwinApp::fire(SimTime now) {
  const auto seq = static_cast<std::uint32_t>(next_epoch_);
  ++next_epoch_;
  if (udp_) {
    udp_->send(seq, now);
  } else {
    tcp_->app_send(now);
  }
  if (next_epoch_ < epochs_.size()) {
    sched_.schedule(epochs_[next_epoch_], [this] { fire(sched_.now()); });
  }
}

OnOffApp::OnOffApp(Scheduler& sched, TcpConnection& conn, RandomStream rng,
                   std::int64_t rate_bps, SimTime duration)
    : sched_(sched), conn_(conn), rng_(std::move(rng)), rate_bps_(rate_bps),
      duration_(duration) {}

void OnOffApp::start(SimTime now) { enter_on(now); }

std::uint64_t OnOffApp::messages_in_period(SimTime on_duration, std::int64_t rate_bps) {
  // Fluid model: a message leaves each time kMessageBytes have accrued.
  const double bits = ns_to_seconds(on_duration) * static_cast<double>(rate_bps);
  return static_cast<std::uint64_t>(bits / (8.0 * kMessageBytes));
}

SimTime OnOffApp::draw_on(RandomStream& rng) {
  return seconds_to_ns(rng.uniform_real(0.0, 2.0));
}

SimTime OnOffApp::draw_off(RandomStream& rng) {
  return seconds_to_ns(rng.uniform_real(0.0, 0.5));
}

void OnOffApp::enter_on(SimTime now) {
  ++cycles_;
  const SimTime on_for = draw_on(rng_);
  const std::uint64_t count = messages_in_period(on_for, rate_bps_);
  const double interval_ns = 8.0 * kMessageBytes * 1e9 / static_cast<double>(rate_bps_);
  for (std::uint64_t k = 1; k <= count; ++k) {
    const auto at = now + static_cast<SimTime>(
                              std::llround(static_cast<double>(k) * interval_ns));
    if (at >= duration_) break;
    sched_.schedule(at, [this] { conn_.app_send(sched_.now()); });
  }
  const SimTime off_at = now + on_for;
  if (off_at < duration_) {
    sched_.schedule(off_at, [this] { enter_off(sched_.now()); });
  }
}

void OnOffApp::enter_off(SimTime now) {
  const SimTime off_for = draw_off(rng_);
  const SimTime on_at = now + off_for;
  if (on_at < duration_) {
    sched_.schedule(on_at, [this] { enter_on(sched_.now()); });
  }
}

void DtSink::record(FlowRecord& rec, std::uint32_t app_seq, SimTime now) {
  if (static_cast<std::int64_t>(app_seq) <= rec.last_recv_seq) {
    throw std::logic_error("duplicate or reordered app delivery: flow " +
                           std::to_string(rec.id) + " seq " + std::to_string(app_seq));
  }
  rec.last_recv_seq = app_seq;
  rec.recv_log.emplace_back(app_seq, now);
}

}  // namespace twinsim
