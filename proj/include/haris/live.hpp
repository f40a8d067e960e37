#pragma once

#include <atomic>
#include <mutex>
#include <thread>

#include "haris/messages.hpp"
#include "haris/runtime.hpp"

namespace haris {

/// Runtime driven by a wall-clock thread and commanded over the bus.
/// Mission commands and initial references are applied between ticks.
class LiveSimulation {
 public:
  /// `rate`: simulated seconds per wall-clock second.
  LiveSimulation(WorldModel world, ScenarioConfig config, Bus& bus, double rate = 1.0);
  ~LiveSimulation();
  LiveSimulation(const LiveSimulation&) = delete;
  LiveSimulation& operator=(const LiveSimulation&) = delete;

  /// Applies queued commands and advances one tick.
  void step();
  void start();
  void stop();

  /// Runs `fn` with the runtime locked against the ticking thread.
  template <class F>
  auto with_runtime(F&& fn) {
    std::lock_guard lock(mu_);
    return fn(runtime_);
  }

 private:
  void apply_commands();

  Bus& bus_;
  Runtime runtime_;
  Bus::SubscriptionPtr commands_, references_;
  double rate_;
  std::mutex mu_;
  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace haris
