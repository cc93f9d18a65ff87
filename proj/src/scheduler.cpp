#include "twinsim/scheduler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace twinsim {

std::uint64_t Scheduler::schedule(SimTime at, Action action) {
  if (at < now_) {
    throw std::logic_error("schedule into the past: t=" + std::to_string(at) +
                           "ns < clock=" + std::to_string(now_) + "ns");
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push_back(Ev{at, seq, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), After{});
  return seq;
}

std::size_t Scheduler::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw std::logic_error("run_until into the past");
  }
  std::size_t count = 0;
  while (!heap_.empty() && heap_.front().at <= t_end) {
    std::pop_heap(heap_.begin(), heap_.end(), After{});
    Ev ev = std::move(heap_.back());
    heap_.pop_back();
    if (ev.at < now_) {
      throw std::logic_error("event queue popped a timestamp in the past");
    }
    now_ = ev.at;
    ++executed_;
    ++count;
    ev.action();
  }
  now_ = t_end;
  return count;
}

}  // namespace twinsim
