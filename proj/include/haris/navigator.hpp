#pragma once

#include <optional>

#include "haris/costmap.hpp"
#include "haris/dwa.hpp"
#include "haris/grid_map.hpp"
#include "haris/mission.hpp"
#include "haris/planner.hpp"

namespace haris {

struct NavigatorConfig {
  DwaParams dwa;
  InflationParams inflation{0.6, 0.25, 5.0, true};
  double replan_period = 1.0;  // s
  double endpoint_search = 0.5;  // m, snap blocked endpoints to free cells this close
  double decel = 0.5;          // m/s^2, speed limit approaching the goal
  double stall_distance = 0.25;  // m; a full stop farther than this from the goal counts as blocked
};

struct NavCommand {
  Twist twist;
  NavStatus status = NavStatus::Ok;
};

/// Global A* replanned at a fixed cadence plus a DWA tracker.
class Navigator {
 public:
  explicit Navigator(NavigatorConfig config = {});

  /// Drives toward `goal` on `map` from the estimated pose.
  NavCommand step(const GridMap& map, const Pose2D& pose, Twist current, Point2D goal, double now);

  /// Tracks a fixed reference path (no global planning).
  NavCommand follow(const GridMap& map, const Path& path, const Pose2D& pose, Twist current, double now);

  void reset();
  const Path& global_path() const { return path_; }
  const std::vector<Pose2D>& local_arc() const { return arc_; }
  const NavigatorConfig& config() const { return config_; }
  NavigatorConfig& config() { return config_; }

 private:
  void refresh_costmaps(const GridMap& map, double now);
  NavCommand track(const Path& path, const Pose2D& pose, Twist current, Point2D end);

  NavigatorConfig config_;
  std::optional<Costmap> costmap_;  // inflated, robot footprint lethal
  std::optional<Costmap> contact_;  // occupied cells only, used to back out of tight spots
  std::optional<double> last_plan_;
  std::optional<double> last_costmap_;
  std::optional<Point2D> goal_;
  Path path_;
  std::vector<Pose2D> arc_;
  NavStatus plan_status_ = NavStatus::Ok;
};

/// Nearest traversable cell center within `radius` of p (p itself if free).
std::optional<Point2D> nearest_traversable(const Costmap& cm, Point2D p, double radius);

}  // namespace haris
