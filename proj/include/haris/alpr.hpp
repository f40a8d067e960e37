#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "haris/geo.hpp"
#include "haris/geometry.hpp"
#include "haris/mission.hpp"
#include "haris/rng.hpp"
#include "haris/world.hpp"

namespace haris {

/// Side camera plus the plate reader behind it.
struct CameraModel {
  Pose2D mount{0.0, 0.0, M_PI / 2.0};  // on the robot, looking left
  double fov = 1.2;                     // rad, full wedge
  double max_range = 6.0;               // m
  std::vector<std::pair<double, double>> p_detect_curve{{0.0, 1.0}, {3.0, 0.95}, {6.0, 0.0}};
  double ocr_char_error_rate = 0.02;
  double light_level = 1.0;  // (0, 1]

  /// Piecewise-linear interpolation of p_detect_curve, clamped at both ends.
  double p_detect(double d) const;
  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

struct Sighting {
  std::string plate_read;
  std::string true_plate;  // ground truth, never consumed by the backend
  double confidence = 0.0;
  Pose2D robot_pose;       // estimated pose when seen
  Point2D local_position;  // car center in the robot's local frame
  GeoPoint car_position;
  std::int64_t timestamp = 0;  // ms
};

/// Substitutes each character with a different digit with probability `rate`.
std::string corrupt_plate(const std::string& plate, double rate, Rng& rng);

/// Everything observe() needs to know about the robot.
struct ObserveContext {
  Pose2D true_pose;       // drives visibility
  Pose2D estimated_pose;  // anchors the reported car position
  GeoReference reference; // robot's current geo reference
  std::int64_t timestamp = 0;
};

/// Sightings for every car whose center lies inside the camera wedge. Each is
/// detected with probability p_detect(d) * light_level; the car position is
/// the camera's relative measurement placed at the estimated pose.
std::vector<Sighting> observe(const WorldModel& world, const ObserveContext& ctx, const CameraModel& cam,
                              const ModuleGates& gates, Rng& rng);

/// Ground-truth pose variant: estimate = truth, world's true reference.
std::vector<Sighting> observe(const WorldModel& world, const Pose2D& pose, const CameraModel& cam,
                              const ModuleGates& gates, std::uint64_t seed);

}  // namespace haris
