#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "twinsim/flowrecord.hpp"

namespace twinsim {

struct FlowStats {
  std::uint64_t sent = 0;       // UDP: datagrams emitted; TCP: messages scheduled
  std::uint64_t delivered = 0;  // in-order app deliveries within the run
  std::optional<double> mean_delay_s;
  std::optional<double> mean_jitter_s;
  std::optional<double> loss_ratio;
  double fa_pps = 0.0;
  std::optional<double> tau;  // only for twin flows
};

// Mean of (receive - send) matched by app seq; empty without receptions.
std::optional<double> mean_delay_s(const FlowRecord& rec);

// Mean |delay_i - delay_{i-1}| over consecutive receptions in receive
// order; empty with fewer than two receptions.
std::optional<double> mean_jitter_s(const FlowRecord& rec);

// UDP: 1 - received/emitted datagrams. TCP: 1 - delivered/scheduled
// messages (retransmitted segments do not multiply-count).
std::optional<double> loss_ratio(const FlowRecord& rec);

struct Alignment {
  double fa_pps;
  double tau;
};

// fa = received / duration over the whole run; tau = fa / fp.
Alignment twin_alignment_ratio(std::uint64_t received_count, double duration_s,
                               double fp_pps);

FlowStats compute_flow_stats(const FlowRecord& rec, double duration_s);

struct Quartiles {
  double mean;
  double min;
  double q1;
  double median;
  double q3;
  double max;
  std::size_t n;
};

// Linear-interpolation quantiles (the numpy default); empty input gives
// no value.
std::optional<Quartiles> quartiles(std::vector<double> values);

}  // namespace twinsim
