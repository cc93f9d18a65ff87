#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "twinsim/time.hpp"

namespace twinsim {

// Deterministic single-threaded event loop. Events run in (time, seq)
// order where seq is the insertion counter, so equal-time events run
// FIFO and a run is a total order independent of platform or allocator.
class Scheduler {
 public:
  using Action = std::function<void()>;

  // Queues an action; throws std::logic_error when `at` precedes the clock.
  std::uint64_t schedule(SimTime at, Action action);

  // Executes every event with time <= t_end (including ones scheduled
  // while running); leaves the clock at exactly t_end. Returns the number
  // of events executed.
  std::size_t run_until(SimTime t_end);

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size(); }
  std::uint64_t executed() const { return executed_; }

 private:
  struct Ev {
    SimTime at;
    std::uint64_t seq;
    Action action;
  };
  struct After {
    bool operator()(const Ev& a, const Ev& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  std::vector<Ev> heap_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t executed_ = 0;
};

}  // namespace twinsim
