#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "haris/geo.hpp"
#include "haris/geometry.hpp"
#include "haris/particle_filter.hpp"

namespace haris {

struct Mission {
  std::string id;
  std::vector<GeoPoint> waypoints;
  double arrival_tolerance = 0.3;  // m
  std::int64_t created_at = 0;     // ms since epoch
};

enum class Phase { Idle, Navigating, Docking, Completed, Aborted };

std::string to_string(Phase p);
Phase parse_phase(const std::string& s);

struct MissionState {
  Phase phase = Phase::Idle;
  std::size_t waypoint_index = 0;  // meaningful while Navigating
  std::string abort_reason;
  std::optional<Mission> active_mission;
};

struct ModuleGates {
  bool alpr_active = false;
};

inline constexpr double kAlprSpeedGate = 0.05;  // m/s

/// ALPR runs only while driving to a waypoint.
inline ModuleGates compute_gates(const MissionState& s, double speed) {
  return {s.phase == Phase::Navigating && std::abs(speed) > kAlprSpeedGate};
}

/// Health of the navigation stack as seen by the executor.
enum class NavStatus { Ok, Blocked, NoPath };

class MissionRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TickResult {
  MissionState state;
  std::optional<Point2D> goal;
  ModuleGates gates;
  bool at_dock = false;  // Docking and within tolerance of the station: call on_docked
};

struct Arrival {
  std::size_t waypoint_index;
  double time;
  Point2D position;  // estimated position at arrival
};

/// Waypoint sequencing, ALPR gating, return-to-station and resync as one
/// state machine. Not thread-safe; owned by the simulation task.
class MissionExecutor {
 public:
  struct Options {
    double unreachable_timeout = 10.0;  // s of continuous Blocked/NoPath before aborting
    bool return_to_station = true;
  };

  explicit MissionExecutor(Pose2D station_local);
  MissionExecutor(Pose2D station_local, Options options);

  /// Converts waypoints to local goals and starts the mission. Throws
  /// MissionRejected while a mission is in progress. A waypoint outside the
  /// projection range aborts the mission and returns no goals.
  std::vector<Point2D> load_mission(const Mission& m, const GeoReference& ref);

  TickResult tick(const LocalizationEstimate& est, double speed, NavStatus nav, double now);

  /// Re-anchors the geo transform at the station. Requires Docking with the
  /// estimate within tolerance of the station; publishes the new reference
  /// through the listener once and completes the mission.
  GeoReference on_docked(const GeoReference& ref, const GeoPoint& station, double station_heading,
                         const LocalizationEstimate& est);

  /// Aborts an in-progress mission (no-op otherwise).
  void abort(const std::string& reason);

  const MissionState& state() const { return state_; }
  const std::vector<Point2D>& goals() const { return goals_; }
  const std::vector<Arrival>& arrivals() const { return arrivals_; }
  bool in_progress() const { return state_.phase == Phase::Navigating || state_.phase == Phase::Docking; }
  const Pose2D& station_local() const { return station_; }
  void set_station_local(const Pose2D& p) { station_ = p; }

  void on_reference(std::function<void(const GeoReference&)> listener) { ref_listener_ = std::move(listener); }
  void on_state(std::function<void(const MissionState&)> listener) { state_listener_ = std::move(listener); }

 private:
  void set_phase(Phase p, std::size_t index = 0, std::string reason = {});
  double tolerance() const;

  Pose2D station_;
  Options options_;
  MissionState state_;
  std::vector<Point2D> goals_;
  std::vector<Arrival> arrivals_;
  std::optional<double> trouble_since_;
  std::function<void(const GeoReference&)> ref_listener_;
  std::function<void(const MissionState&)> state_listener_;
};

}  // namespace haris
