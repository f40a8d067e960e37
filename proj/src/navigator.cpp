#include "haris/navigator.hpp"

#include <algorithm>
#include <cmath>

namespace haris {

Navigator::Navigator(NavigatorConfig config) : config_(config) { config_.dwa.validate(); }

void Navigator::reset() {
  last_plan_.reset();
  last_costmap_.reset();
  goal_.reset();
  path_ = {};
  arc_.clear();
  plan_status_ = NavStatus::Ok;
}

std::optional<Point2D> nearest_traversable(const Costmap& cm, Point2D p, double radius) {
  if (traversable(cm.cost_at(p)) && world_to_grid(cm.geometry(), p)) return p;
  const auto c = world_to_grid_unbounded(cm.geometry(), p);
  const int r = static_cast<int>(std::ceil(radius / cm.resolution()));
  std::optional<Point2D> best;
  double best_d = radius + 1e-9;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      const CellIndex n{c.col + dc, c.row + dr};
      if (!cm.geometry().in_bounds(n) || !traversable(cm.cost(n))) continue;
      const Point2D q = grid_to_world(cm.geometry(), n);
      const double d = distance(q, p);
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
  }
  return best;
}

void Navigator::refresh_costmaps(const GridMap& map, double now) {
  if (last_costmap_ && now - *last_costmap_ < config_.replan_period - 1e-9) return;
  costmap_ = inflate(map, config_.inflation);
  InflationParams contact = config_.inflation;
  contact.inscribed_radius = 0.0;
  contact_ = inflate(map, contact);
  last_costmap_ = now;
}

NavCommand Navigator::track(const Path& path, const Pose2D& pose, Twist current, Point2D end) {
  DwaParams p = config_.dwa;
  const double remaining = distance(pose.position(), end);
  p.v_max = std::clamp(std::sqrt(2.0 * config_.decel * remaining), 0.05, config_.dwa.v_max);
  p.min_lookahead = std::min(p.min_lookahead, std::max(remaining, 1e-3));
  const Costmap& cm = costmap_->lethal_at(pose.position()) ? *contact_ : *costmap_;
  DwaResult r = dwa_step(cm, pose, current, path, p);
  arc_ = r.arc;
  if (r.blocked) return {Twist{}, NavStatus::Blocked};
  if (r.twist == Twist{} && remaining > config_.stall_distance) return {Twist{}, NavStatus::Blocked};
  return {r.twist, NavStatus::Ok};
}

NavCommand Navigator::step(const GridMap& map, const Pose2D& pose, Twist current, Point2D goal, double now) {
  const bool new_goal = !goal_ || distance(*goal_, goal) > 1e-9;
  refresh_costmaps(map, now);
  if (new_goal || !last_plan_ || now - *last_plan_ >= config_.replan_period - 1e-9) {
    goal_ = goal;
    last_plan_ = now;
    const auto start = nearest_traversable(*costmap_, pose.position(), config_.endpoint_search);
    const auto target = nearest_traversable(*costmap_, goal, config_.endpoint_search);
    plan_status_ = NavStatus::NoPath;
    if (start && target) {
      try {
        path_ = plan_global(*costmap_, *start, *target);
        path_.waypoints.back() = Pose2D(goal.x, goal.y, path_.waypoints.back().theta);
        plan_status_ = NavStatus::Ok;
      } catch (const PlanningError&) {
        path_ = {};
      }
    } else {
      path_ = {};
    }
  }
  if (plan_status_ != NavStatus::Ok || path_.waypoints.empty()) {
    arc_.clear();
    return {Twist{}, NavStatus::NoPath};
  }
  return track(path_, pose, current, goal);
}

NavCommand Navigator::follow(const GridMap& map, const Path& path, const Pose2D& pose, Twist current, double now) {
  refresh_costmaps(map, now);
  path_ = path;
  return track(path, pose, current, path.waypoints.back().position());
}

}  // namespace haris
