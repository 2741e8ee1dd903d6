#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "osmec/core/vtime.hpp"

namespace osmec {

/// Single-threaded discrete-event scheduler and the sole owner of virtual
/// time. Events at equal timestamps run in scheduling order.
class SimEngine {
 public:
  VirtTime now() const { return now_; }

  void schedule_at(VirtTime t, std::function<void()> fn) {
    assert(t >= now_);
    queue_.push(Entry{t, ++tick_, std::move(fn)});
  }

  void schedule_in(VirtTime delay, std::function<void()> fn) {
    schedule_at(now_ + delay, std::move(fn));
  }

  /// Drain the queue. Virtual time only moves forward.
  void run() {
    assert(!running_);
    running_ = true;
    while (!queue_.empty()) {
      Entry e = queue_.top();
      queue_.pop();
      assert(e.t >= now_);
      now_ = e.t;
      if (++steps_ > max_steps_) {
        running_ = false;
        throw std::runtime_error("simulation step limit exceeded");
      }
      e.fn();
    }
    running_ = false;
  }

  bool running() const { return running_; }
  bool idle() const { return queue_.empty(); }
  std::uint64_t steps() const { return steps_; }
  void set_step_limit(std::uint64_t limit) { max_steps_ = limit; }

 private:
  struct Entry {
    VirtTime t;
    std::uint64_t tick;
    std::function<void()> fn;
    bool operator>(const Entry& o) const {
      if (t != o.t) return o.t < t;
      return tick > o.tick;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  VirtTime now_;
  std::uint64_t tick_ = 0;
  std::uint64_t steps_ = 0;
  std::uint64_t max_steps_ = 200'000'000;
  bool running_ = false;
};

}  // namespace osmec
