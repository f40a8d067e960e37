#include "haris/dwa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace haris {

void DwaParams::validate() const {
  const bool ok = v_samples > 0 && w_samples > 0 && horizon > 0 && sim_step > 0 && dt > 0 && accel_v > 0 &&
                  accel_w > 0 && v_max > 0 && omega_max > 0 && alpha_heading > 0 && beta_clearance > 0 &&
                  gamma_velocity > 0 && clearance_cap > 0 && min_lookahead > 0;
  if (!ok) throw std::invalid_argument("DwaParams: all fields must be positive");
}

DynamicWindow dynamic_window(Twist current, const DwaParams& p) {
  DynamicWindow w;
  w.v_lo = std::clamp(current.v - p.accel_v * p.dt, 0.0, p.v_max);
  w.v_hi = std::clamp(current.v + p.accel_v * p.dt, 0.0, p.v_max);
  w.w_lo = std::clamp(current.omega - p.accel_w * p.dt, -p.omega_max, p.omega_max);
  w.w_hi = std::clamp(current.omega + p.accel_w * p.dt, -p.omega_max, p.omega_max);
  return w;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 1 || hi - lo < 1e-12) {
    out.push_back(n <= 1 ? 0.5 * (lo + hi) : lo);
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

}  // namespace

std::vector<Twist> window_samples(const DynamicWindow& w, const DwaParams& p) {
  const std::vector<double> vs = linspace(w.v_lo, w.v_hi, p.v_samples);
  std::vector<double> ws = linspace(w.w_lo, w.w_hi, p.w_samples);
  if (w.w_lo <= 0.0 && w.w_hi >= 0.0) {
    bool has_zero = false;
    for (double& om : ws) {
      if (std::abs(om) < 1e-12) {
        om = 0.0;
        has_zero = true;
      }
    }
    if (!has_zero) ws.push_back(0.0);
  }
  std::vector<Twist> out;
  out.reserve(vs.size() * ws.size());
  for (double v : vs)
    for (double om : ws) out.push_back({v, om});
  return out;
}

std::vector<Pose2D> simulate_arc(const Pose2D& pose, Twist t, const DwaParams& p) {
  const int steps = std::max(1, static_cast<int>(std::lround(p.horizon / p.sim_step)));
  std::vector<Pose2D> arc;
  arc.reserve(steps);
  for (int i = 1; i <= steps; ++i) arc.push_back(integrate_unicycle(pose, t, p.sim_step * i));
  return arc;
}

namespace {

bool line_of_sight(const Costmap& cm, Point2D a, Point2D b) {
  const double step = 0.5 * cm.resolution();
  const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / step)));
  for (int i = 1; i <= n; ++i)
    if (cm.lethal_at(a + (static_cast<double>(i) / n) * (b - a))) return false;
  return true;
}

}  // namespace

Point2D lookahead_point(const Path& path, const Pose2D& pose, double lookahead, const Costmap* cm) {
  const auto& wp = path.waypoints;
  if (wp.empty()) return pose.position();
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const double d = distance(wp[i].position(), pose.position());
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  for (std::size_t i = nearest; i < wp.size(); ++i) {
    if (cm && i > nearest && !line_of_sight(*cm, pose.position(), wp[i].position())) return wp[i - 1].position();
    if (distance(wp[i].position(), pose.position()) >= lookahead) return wp[i].position();
  }
  return wp.back().position();
}

ArcScore score_arc(const Costmap& cm, const std::vector<Pose2D>& arc, Twist t, Point2D target,
                   const DwaParams& p) {
  ArcScore s;
  double clearance = std::numeric_limits<double>::infinity();
  for (const auto& q : arc) {
    if (cm.lethal_at(q.position())) {
      s.collides = true;
      return s;
    }
    clearance = std::min(clearance, cm.clearance_at(q.position()));
  }
  const Pose2D& end = arc.back();
  const Point2D to = target - end.position();
  double err = 0.0;
  if (norm(to) > 1e-9) err = std::abs(normalize_angle(std::atan2(to.y, to.x) - end.theta));
  s.heading = 1.0 - err / std::numbers::pi;
  s.clearance = std::min(clearance, p.clearance_cap) / p.clearance_cap;
  s.velocity = std::abs(t.v) / p.v_max;
  s.total = p.alpha_heading * s.heading + p.beta_clearance * s.clearance + p.gamma_velocity * s.velocity;
  return s;
}

DwaResult dwa_step(const Costmap& cm, const Pose2D& pose, Twist current, const Path& path,
                   const DwaParams& params) {
  if (path.waypoints.empty()) throw std::invalid_argument("dwa_step: empty path");
  const DynamicWindow w = dynamic_window(current, params);
  const std::vector<Twist> samples = window_samples(w, params);
  const Point2D target =
      lookahead_point(path, pose, std::max(params.min_lookahead, params.v_max * params.horizon + 0.5), &cm);

  DwaResult best;
  best.blocked = true;
  for (const Twist& t : samples) {
    std::vector<Pose2D> arc = simulate_arc(pose, t, params);
    const ArcScore s = score_arc(cm, arc, t, target, params);
    if (s.collides) continue;
    bool better = best.blocked;
    if (!better) {
      if (s.total > best.score.total + 1e-12) better = true;
      else if (s.total >= best.score.total - 1e-12 && std::abs(t.omega) < std::abs(best.twist.omega) - 1e-12)
        better = true;
    }
    if (better) {
      best.twist = t;
      best.blocked = false;
      best.arc = std::move(arc);
      best.score = s;
    }
  }
  if (best.blocked) best.twist = {};
  return best;
}

}  // namespace haris
