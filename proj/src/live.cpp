#include "haris/live.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

namespace haris {

LiveSimulation::LiveSimulation(WorldModel world, ScenarioConfig config, Bus& bus, double rate)
    : bus_(bus),
      runtime_(std::move(world), std::move(config), &bus),
      commands_(bus.subscribe(topics::kMissionCommand, 64)),
      references_(bus.subscribe(topics::kInitialReference, 16)),
      rate_(rate) {}

LiveSimulation::~LiveSimulation() {
  stop();
  bus_.unsubscribe(commands_);
  bus_.unsubscribe(references_);
}

void LiveSimulation::apply_commands() {
  while (auto e = references_->try_pop()) {
    if (const auto* r = std::get_if<GeoReference>(&e->payload)) {
      runtime_.set_reference(*r);
      spdlog::info("reference set to {:.7f}, {:.7f}", r->origin.lat, r->origin.lon);
    }
  }
  while (auto e = commands_->try_pop()) {
    const auto* c = std::get_if<MissionCommand>(&e->payload);
    if (!c) continue;
    if (c->action == MissionCommand::Action::Abort) {
      runtime_.abort_mission("aborted by operator");
      continue;
    }
    try {
      runtime_.submit(c->mission);
      spdlog::info("mission {} started with {} waypoints", c->mission.id, c->mission.waypoints.size());
    } catch (const MissionRejected& err) {
      spdlog::warn("mission {} rejected: {}", c->mission.id, err.what());
      bus_.publish(topics::kMissionState, MissionStateMsg{c->mission.id, Phase::Aborted, 0, err.what()});
    }
  }
}

void LiveSimulation::step() {
  std::lock_guard lock(mu_);
  apply_commands();
  runtime_.tick();
}

void LiveSimulation::start() {
  if (running_.exchange(true)) return;
  thread_ = std::thread([this] {
    const auto period = std::chrono::duration<double>(runtime_.config().dt / rate_);
    auto next = std::chrono::steady_clock::now();
    while (running_) {
      step();
      next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
      std::this_thread::sleep_until(next);
    }
  });
}

void LiveSimulation::stop() {
  if (!running_.exchange(false)) return;
  if (thread_.joinable()) thread_.join();
}

}  // namespace haris
