#include "twinsim/sweep.hpp"

#include <atomic>
#include <exception>
#include <thread>

namespace twinsim {

SweepAxes SweepAxes::paper_matrix() {
  SweepAxes axes;
  axes.scales = {TopologyScale::Small, TopologyScale::Middle, TopologyScale::Large};
  axes.protocols = {Protocol::Udp, Protocol::Tcp};
  axes.fp_values = {0.5, 1.0, 2.0, 5.0, 10.0};
  axes.background = {false, true};
  axes.seeds = {1, 2, 3, 4, 5};
  return axes;
}

std::vector<ScenarioConfig> expand_axes(const ScenarioConfig& base, const SweepAxes& axes) {
  std::vector<ScenarioConfig> out;
  for (TopologyScale scale : axes.scales) {
    for (Protocol proto : axes.protocols) {
      for (double fp : axes.fp_values) {
        for (bool bt : axes.background) {
          for (std::uint64_t seed : axes.seeds) {
            ScenarioConfig c = base;
            c.scale = scale;
            c.protocol = proto;
            c.fp_pps = fp;
            c.background_traffic = bt;
            c.seed = seed;
            out.push_back(c);
          }
        }
      }
    }
  }
  return out;
}

std::vector<RunOutcome> run_sweep(const std::vector<ScenarioConfig>& configs,
                                  unsigned jobs) {
  std::vector<RunOutcome> outcomes(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) outcomes[i].config = configs[i];
  if (jobs == 0) jobs = 1;
  jobs = std::min<unsigned>(jobs, configs.size() == 0 ? 1 : configs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        outcomes[i].result = run_scenario(configs[i]);
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return outcomes;
}

}  // namespace twinsim
