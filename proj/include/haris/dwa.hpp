#pragma once

#include <cstddef>
#include <vector>

#include "haris/costmap.hpp"
#include "haris/geometry.hpp"
#include "haris/planner.hpp"

namespace haris {

struct DwaParams {
  int v_samples = 7;
  int w_samples = 21;
  double horizon = 1.5;      // s
  double sim_step = 0.1;     // s, arc discretization
  double dt = 0.05;          // s, control period defining the dynamic window
  double accel_v = 1.0;      // m/s^2
  double accel_w = 3.0;      // rad/s^2
  double v_max = 1.0;
  double omega_max = 1.5;
  double alpha_heading = 0.8;
  double beta_clearance = 0.2;
  double gamma_velocity = 0.1;
  double clearance_cap = 0.3;   // m; clearance above this scores the same
  double min_lookahead = 1.0;   // m

  /// Throws std::invalid_argument unless all fields are positive.
  void validate() const;
};

/// Reachable velocities for one control period.
struct DynamicWindow {
  double v_lo = 0.0, v_hi = 0.0;
  double w_lo = 0.0, w_hi = 0.0;

  bool contains(Twist t, double eps = 1e-12) const {
    return t.v >= v_lo - eps && t.v <= v_hi + eps && t.omega >= w_lo - eps && t.omega <= w_hi + eps;
  }
};

DynamicWindow dynamic_window(Twist current, const DwaParams& params);

/// Velocity samples in window order; zero turn rate is always present when the
/// window contains it.
std::vector<Twist> window_samples(const DynamicWindow& w, const DwaParams& params);

/// Poses along the arc at every sim_step up to the horizon (start excluded).
std::vector<Pose2D> simulate_arc(const Pose2D& pose, Twist t, const DwaParams& params);

/// Path point the local planner steers toward: the first waypoint past the
/// nearest one at least `lookahead` away. With a costmap, never a waypoint
/// hidden behind a lethal cell.
Point2D lookahead_point(const Path& path, const Pose2D& pose, double lookahead, const Costmap* cm = nullptr);

struct ArcScore {
  bool collides = false;
  double heading = 0.0;    // 1 - |bearing error at arc end| / pi
  double clearance = 0.0;  // min clearance along the arc / cap
  double velocity = 0.0;   // |v| / v_max
  double total = 0.0;
};

ArcScore score_arc(const Costmap& cm, const std::vector<Pose2D>& arc, Twist t, Point2D target,
                   const DwaParams& params);

struct DwaResult {
  Twist twist;
  bool blocked = false;
  std::vector<Pose2D> arc;  // chosen arc, for display
  ArcScore score;
};

/// One dynamic-window step. If every sampled arc hits a lethal cell the
/// result is the stop twist with `blocked` set.
DwaResult dwa_step(const Costmap& cm, const Pose2D& pose, Twist current, const Path& path,
                   const DwaParams& params = {});

}  // namespace haris
