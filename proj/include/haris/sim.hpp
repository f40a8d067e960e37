#pragma once

#include <cstdint>

#include "haris/geo.hpp"
#include "haris/geometry.hpp"
#include "haris/laser_scan.hpp"
#include "haris/rng.hpp"
#include "haris/world.hpp"

namespace haris {

struct SimState {
  Pose2D true_pose;
  Twist commanded;
  double clock = 0.0;  // seconds
  std::uint64_t rng_seed = 0;
  bool contact = false;
};

/// Exact unicycle integration over dt. The robot is a disc of profile.radius;
/// if the arc would bring it into a wall or car, it stops at the last
/// collision-free point and `contact` is set.
SimState step_dynamics(const WorldModel& world, const RobotProfile& profile, const SimState& s,
                       Twist cmd, double dt);


/// True when a disc of `radius` at p intersects any obstacle segment or car footprint.
bool in_collision(const WorldModel& world, Point2D p, double radius);

/// Ray-cast range scan from the sensor at `pose` against walls and car footprints.
LaserScan sim_lidar(const WorldModel& world, const Pose2D& pose, const ScanSpec& spec,
                    const NoiseProfile& noise, Rng& rng);
LaserScan sim_lidar(const WorldModel& world, const Pose2D& pose, const ScanSpec& spec,
                    const NoiseProfile& noise, std::uint64_t seed);

/// Noisy relative motion from prev to curr, in prev's frame.
Pose2D sim_odometry(const Pose2D& prev, const Pose2D& curr, const NoiseProfile& noise, Rng& rng);
Pose2D sim_odometry(const Pose2D& prev, const Pose2D& curr, const NoiseProfile& noise, std::uint64_t seed);

/// GPS fix of the true position with isotropic gaussian error of gps_std per axis.
GeoPoint sim_gps(const Pose2D& true_pose, const GeoReference& ref, const NoiseProfile& noise, Rng& rng);
GeoPoint sim_gps(const Pose2D& true_pose, const GeoReference& ref, const NoiseProfile& noise,
                 std::uint64_t seed);

/// Compass heading of the robot in the local frame (radians, counter-clockwise).
double sim_compass(const Pose2D& true_pose, const NoiseProfile& noise, Rng& rng);

}  // namespace haris
