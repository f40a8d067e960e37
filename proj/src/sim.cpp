#include "haris/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace haris {

bool in_collision(const WorldModel& world, Point2D p, double radius) {
  for (const auto& w : world.walls)
    if (segment_distance(w, p) < radius) return true;
  for (const auto& car : world.parked_cars) {
    if (car.contains(p)) return true;
    if (distance(car.pose.position(), p) > std::hypot(car.length, car.width) / 2.0 + radius) continue;
    for (const auto& e : car.edges())
      if (segment_distance(e, p) < radius) return true;
  }
  return false;
}

SimState step_dynamics(const WorldModel& world, const RobotProfile& profile, const SimState& s,
                       Twist cmd, double dt) {
  SimState out = s;
  cmd = clamp_twist(cmd, profile);
  out.commanded = cmd;
  out.clock = s.clock + dt;
  out.contact = false;

  const Pose2D target = integrate_unicycle(s.true_pose, cmd, dt);
  const double travel = std::abs(cmd.v) * dt;
  const int samples = std::max(1, static_cast<int>(std::ceil(travel / 0.01)));
  double free_frac = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double frac = static_cast<double>(i) / samples;
    const Pose2D p = integrate_unicycle(s.true_pose, cmd, dt * frac);
    if (in_collision(world, p.position(), profile.radius)) {
      double lo = free_frac, hi = frac;
      for (int k = 0; k < 20; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (in_collision(world, integrate_unicycle(s.true_pose, cmd, dt * mid).position(), profile.radius)) hi = mid;
        else lo = mid;
      }
      out.true_pose = integrate_unicycle(s.true_pose, cmd, dt * lo);
      out.commanded = Twist{};
      out.contact = true;
      return out;
    }
    free_frac = frac;
  }
  out.true_pose = target;
  return out;
}

LaserScan sim_lidar(const WorldModel& world, const Pose2D& pose, const ScanSpec& spec,
                    const NoiseProfile& noise, Rng& rng) {
  LaserScan scan;
  scan.angle_min = spec.angle_min;
  scan.angle_max = spec.angle_max;
  scan.angle_increment = spec.angle_increment;
  scan.range_max = spec.range_max;
  const std::size_t n = scan.beam_count();
  scan.ranges.assign(n, scan.no_return_value());

  // Only segments that could be within range matter.
  std::vector<Segment> segments;
  for (const auto& s : world.obstacle_segments())
    if (segment_distance(s, pose.position()) <= spec.range_max) segments.push_back(s);

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pose.theta + scan.angle(i);
    const Point2D dir{std::cos(a), std::sin(a)};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : segments) {
      double t;
      if (ray_segment(pose.position(), dir, s, t) && t < best) best = t;
    }
    // One draw per beam keeps the stream aligned regardless of hits.
    const double e = gauss(rng) * noise.lidar_range_std;
    if (best <= spec.range_max) {
      const double r = std::max(0.0, best + e);
      scan.ranges[i] = r <= spec.range_max ? r : scan.no_return_value();
    }
  }
  return scan;
}

LaserScan sim_lidar(const WorldModel& world, const Pose2D& pose, const ScanSpec& spec,
                    const NoiseProfile& noise, std::uint64_t seed) {
  Rng rng(seed);
  return sim_lidar(world, pose, spec, noise, rng);
}

Pose2D sim_odometry(const Pose2D& prev, const Pose2D& curr, const NoiseProfile& noise, Rng& rng) {
  const Pose2D d = relative(prev, curr);
  const double trans = std::hypot(d.x, d.y);
  const double rot = d.theta;
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double et = gauss(rng) * noise.odom_trans_std * trans;
  const double er = gauss(rng) * noise.odom_rot_std * noise.odom_rot_multiplier * std::abs(rot);
  const double noisy_trans = trans + et;
  const double noisy_rot = rot * (1.0 + noise.odom_rot_bias) + er;
  if (trans < 1e-15) return {0.0, 0.0, noisy_rot};
  const double heading = std::atan2(d.y, d.x);
  return {noisy_trans * std::cos(heading), noisy_trans * std::sin(heading), noisy_rot};
}

Pose2D sim_odometry(const Pose2D& prev, const Pose2D& curr, const NoiseProfile& noise, std::uint64_t seed) {
  Rng rng(seed);
  return sim_odometry(prev, curr, noise, rng);
}

GeoPoint sim_gps(const Pose2D& true_pose, const GeoReference& ref, const NoiseProfile& noise, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double ex = gauss(rng) * noise.gps_std;
  const double ey = gauss(rng) * noise.gps_std;
  return to_gps(ref, {true_pose.x + ex, true_pose.y + ey});
}

GeoPoint sim_gps(const Pose2D& true_pose, const GeoReference& ref, const NoiseProfile& noise,
                 std::uint64_t seed) {
  Rng rng(seed);
  return sim_gps(true_pose, ref, noise, rng);
}

double sim_compass(const Pose2D& true_pose, const NoiseProfile& noise, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  return normalize_angle(true_pose.theta + gauss(rng) * noise.compass_std);
}

}  // namespace haris
