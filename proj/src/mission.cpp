#include "haris/mission.hpp"

#include <stdexcept>

namespace haris {

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::Navigating: return "Navigating";
    case Phase::Docking: return "Docking";
    case Phase::Completed: return "Completed";
    case Phase::Aborted: return "Aborted";
  }
  return "Idle";
}

Phase parse_phase(const std::string& s) {
  for (Phase p : {Phase::Idle, Phase::Navigating, Phase::Docking, Phase::Completed, Phase::Aborted})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown mission phase '" + s + "'");
}

MissionExecutor::MissionExecutor(Pose2D station_local) : MissionExecutor(station_local, Options{}) {}

MissionExecutor::MissionExecutor(Pose2D station_local, Options options)
    : station_(station_local), options_(options) {}

double MissionExecutor::tolerance() const {
  return state_.active_mission ? state_.active_mission->arrival_tolerance : 0.3;
}

void MissionExecutor::set_phase(Phase p, std::size_t index, std::string reason) {
  state_.phase = p;
  state_.waypoint_index = index;
  state_.abort_reason = std::move(reason);
  trouble_since_.reset();
  if (state_listener_) state_listener_(state_);
}

std::vector<Point2D> MissionExecutor::load_mission(const Mission& m, const GeoReference& ref) {
  if (in_progress()) throw MissionRejected("mission in progress");
  if (m.waypoints.empty()) throw MissionRejected("mission has no waypoints");
  if (!(m.arrival_tolerance > 0.0)) throw MissionRejected("arrival tolerance must be positive");

  state_.active_mission = m;
  goals_.clear();
  arrivals_.clear();
  try {
    for (const auto& g : m.waypoints) goals_.push_back(to_local(ref, g));
  } catch (const OutOfProjectionRange& e) {
    goals_.clear();
    set_phase(Phase::Aborted, 0, std::string("waypoint out of range: ") + e.what());
    return {};
  }
  set_phase(Phase::Navigating, 0);
  return goals_;
}

TickResult MissionExecutor::tick(const LocalizationEstimate& est, double speed, NavStatus nav, double now) {
  TickResult out;
  const Point2D here = est.pose.position();

  if (state_.phase == Phase::Navigating) {
    // At most one arrival per tick keeps the order observable.
    if (distance(here, goals_[state_.waypoint_index]) <= tolerance()) {
      arrivals_.push_back({state_.waypoint_index, now, here});
      if (state_.waypoint_index + 1 < goals_.size()) set_phase(Phase::Navigating, state_.waypoint_index + 1);
      else if (options_.return_to_station) set_phase(Phase::Docking);
      else set_phase(Phase::Completed);
    }
  }

  if (in_progress()) {
    if (nav == NavStatus::Ok) {
      trouble_since_.reset();
    } else {
      if (!trouble_since_) trouble_since_ = now;
      if (now - *trouble_since_ > options_.unreachable_timeout) set_phase(Phase::Aborted, 0, "unreachable");
    }
  }

  if (state_.phase == Phase::Navigating) out.goal = goals_[state_.waypoint_index];
  if (state_.phase == Phase::Docking) {
    out.goal = station_.position();
    out.at_dock = distance(here, station_.position()) <= tolerance();
  }
  out.state = state_;
  out.gates = compute_gates(state_, speed);
  return out;
}

GeoReference MissionExecutor::on_docked(const GeoReference& ref, const GeoPoint& station, double station_heading,
                                        const LocalizationEstimate& est) {
  if (state_.phase != Phase::Docking) throw MissionRejected("on_docked outside Docking");
  if (distance(est.pose.position(), station_.position()) > tolerance())
    throw MissionRejected("on_docked: robot is not at the station");
  const GeoReference next = resync(ref, station, station_heading, est.pose);
  if (ref_listener_) ref_listener_(next);
  set_phase(Phase::Completed);
  return next;
}

void MissionExecutor::abort(const std::string& reason) {
  if (in_progress()) set_phase(Phase::Aborted, 0, reason);
}

}  // namespace haris
