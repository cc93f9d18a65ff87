#pragma once

#include <cstdint>
#include <vector>

#include "twinsim/flowrecord.hpp"
#include "twinsim/rng.hpp"
#include "twinsim/scheduler.hpp"
#include "twinsim/transport.hpp"

namespace twinsim {

// Twin update epochs: {k/f_p : k >= 0, k/f_p < duration}.
std::vector<SimTime> twin_schedule(double fp_pps, SimTime duration);

// Periodic sender on a twinned device. Messages go out at exactly the
// planned epochs; over UDP each is a datagram, over TCP it is appended
// to the connection's stream (which may buffer under congestion).
class TwinApp {
 public:
  TwinApp(Scheduler& sched, UdpFlow* udp, TcpConnection* tcp, double fp_pps,
          SimTime duration);

  void start();
  std::uint64_t messages_scheduled() const { return next_epoch_; }

 private:
  void fire(SimTime now);

  Scheduler& sched_;
  UdpFlow* udp_;
  TcpConnection* tcp_;
  std::vector<SimTime> epochs_;
  std::size_t next_epoch_ = 0;
};

// Background traffic toward one end user: alternates on ~ U[0,2] s and
// off ~ U[0,0.5] s; while on, 1024-byte messages are offered to the TCP
// connection at the configured rate.
class OnOffApp {
 public:
  OnOffApp(Scheduler& sched, TcpConnection& conn, RandomStream rng,
           std::int64_t rate_bps, SimTime duration);

  void start(SimTime now);

  std::uint64_t cycles() const { return cycles_; }

  // Messages a single on-period offers at `rate_bps`.
  static std::uint64_t messages_in_period(SimTime on_duration, std::int64_t rate_bps);

  static SimTime draw_on(RandomStream& rng);
  static SimTime draw_off(RandomStream& rng);

 private:
  void enter_on(SimTime now);
  void enter_off(SimTime now);

  Scheduler& sched_;
  TcpConnection& conn_;
  RandomStream rng_;
  std::int64_t rate_bps_;
  SimTime duration_;
  std::uint64_t cycles_ = 0;
};

// Reception log keeper: transports call this exactly once per in-order
// delivered message.
class DtSink {
 public:
  static void record(FlowRecord& rec, std::uint32_t app_seq, SimTime now);
};

inline constexpr std::uint32_t kMessageBytes = 1024;

}  // namespace twinsim
