#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "haris/alpr.hpp"
#include "haris/messages.hpp"
#include "haris/mission.hpp"
#include "haris/navigator.hpp"
#include "haris/sim.hpp"
#include "haris/slam.hpp"
#include "haris/world.hpp"

namespace haris {

/// gps_only: raw GPS fixes held between updates, compass heading.
/// fused: particle filter on the map built so far.
/// odom: dead reckoning from wheel odometry only.
enum class LocalizationMode { GpsOnly, Fused, Odom };

std::string to_string(LocalizationMode m);
LocalizationMode parse_localization_mode(const std::string& s);

struct TeleopSegment {
  double duration = 0.0;  // s
  Twist twist;
};

struct ScenarioConfig {
  std::filesystem::path world_path;
  std::optional<std::filesystem::path> mission_path;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  double duration = 600.0;  // s, simulated
  double dt = 0.05;         // s
  LocalizationMode mode = LocalizationMode::Fused;
  double speed = 0.5;  // m/s, navigation speed limit
  double gps_rate_hz = 1.0;
  double scan_rate_hz = 10.0;
  double alpr_rate_hz = 5.0;
  std::size_t particles = 500;
  double map_resolution = 0.05;
  double map_margin = 2.0;         // m beyond the world bounds
  double dock_capture_radius = 1.0;  // m, true distance at which the dock pulls the robot in
  bool return_to_station = true;
  std::optional<Pose2D> start_pose;  // defaults to the station
  std::vector<TeleopSegment> teleop;
  std::vector<Point2D> reference_path;  // follow this path instead of a mission
  CameraModel camera;

  void validate() const;
};

struct TrajectoryRow {
  double t;
  Pose2D truth;
  Pose2D estimate;
};

/// The robot stack on top of the simulator: sensors, localization, mission
/// executor, navigation and ALPR, advanced one tick at a time. Shared by the
/// batch runner and the live server.
class Runtime {
 public:
  Runtime(WorldModel world, ScenarioConfig config, Bus* bus = nullptr);

  /// Starts a mission from GPS waypoints using the robot's current reference.
  /// Throws MissionRejected while one is running.
  void submit(const Mission& m);
  void abort_mission(const std::string& reason);
  /// Replaces the robot's geo reference (operator-initialized location).
  void set_reference(const GeoReference& ref);

  TrajectoryRow tick();

  /// Mission terminal, teleop script and reference path exhausted.
  bool idle() const;

  double now() const { return sim_.clock; }
  const WorldModel& world() const { return world_; }
  const ScenarioConfig& config() const { return config_; }
  const SimState& sim() const { return sim_; }
  LocalizationEstimate estimate() const { return est_; }
  const GeoReference& reference() const { return reference_; }
  const GridMap& map() const;
  const MissionExecutor& executor() const { return executor_; }
  const Navigator& navigator() const { return navigator_; }
  const std::vector<Sighting>& sightings() const { return sightings_; }
  std::size_t resync_count() const { return resyncs_; }
  double estimated_speed() const { return speed_est_; }
  bool follow_done() const { return follow_done_; }

 private:
  void localize(const Pose2D& prev_true);
  void publish(const std::string& topic, Message m);
  void publish_state(const MissionState& s);
  Twist control(const TickResult& tr);

  WorldModel world_;
  ScenarioConfig config_;
  Bus* bus_;
  RobotProfile profile_;
  GeoReference true_reference_;
  GeoReference reference_;
  SimState sim_;
  Rng odom_rng_, lidar_rng_, gps_rng_, compass_rng_, alpr_rng_;
  std::optional<SlamPipeline> slam_;
  GridMap blind_map_;  // empty map for modes without mapping
  LocalizationEstimate est_;
  Pose2D dead_reckoned_;
  double speed_est_ = 0.0;
  double next_scan_ = 0.0, next_gps_ = 0.0, next_alpr_ = 0.0, next_pose_pub_ = 0.0, next_map_pub_ = 0.0;
  MissionExecutor executor_;
  Navigator navigator_;
  NavStatus nav_status_ = NavStatus::Ok;
  Path reference_path_;
  bool follow_done_ = true;
  std::size_t teleop_index_ = 0;
  double teleop_elapsed_ = 0.0;
  std::vector<Sighting> sightings_;
  std::size_t resyncs_ = 0;
  std::size_t tick_count_ = 0;
};

/// Loads a mission file: {"id"?, "waypoints": [{lat, lon}], "tolerance"?}.
Mission load_mission(const std::filesystem::path& p);

struct RunResult {
  Phase phase = Phase::Idle;
  std::string reason;
  std::size_t ticks = 0;
  int exit_code = 0;
};

/// Batch run writing trajectory.csv, map.pgm/map.yaml, sightings.csv and
/// metrics.json into config.output_dir.
RunResult run_scenario(const ScenarioConfig& config);
RunResult run_scenario(const WorldModel& world, const ScenarioConfig& config, const std::optional<Mission>& mission,
                       Bus* bus = nullptr);

/// Root-mean-square perpendicular distance of points from a polyline.
double rms_cross_track(const std::vector<Point2D>& points, const std::vector<Point2D>& path);
double cross_track_distance(Point2D p, const std::vector<Point2D>& path);

}  // namespace haris
