#pragma once

#include <cstdint>
#include <vector>

#include "twinsim/results.hpp"
#include "twinsim/scenario.hpp"

namespace twinsim {

struct SweepAxes {
  std::vector<TopologyScale> scales;
  std::vector<Protocol> protocols;
  std::vector<double> fp_values;
  std::vector<bool> background;
  std::vector<std::uint64_t> seeds;

  // The full experiment matrix: 3 scales x 2 protocols x 5 frequencies
  // x bt on/off x seeds 1..5.
  static SweepAxes paper_matrix();
};

// One config per point of the Cartesian product, in axis order.
std::vector<ScenarioConfig> expand_axes(const ScenarioConfig& base, const SweepAxes& axes);

// Runs every config (at most `jobs` concurrently; each run stays
// single-threaded) and returns outcomes in config order regardless of
// completion order. A failed run is recorded, not fatal.
std::vector<RunOutcome> run_sweep(const std::vector<ScenarioConfig>& configs,
                                  unsigned jobs);

}  // namespace twinsim
