#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "haris/geo.hpp"
#include "haris/geometry.hpp"

namespace haris {

enum class VehicleClass { Car, Truck, Bus, Motorbike };

inline constexpr std::array<VehicleClass, 4> kVehicleClasses = {
    VehicleClass::Car, VehicleClass::Truck, VehicleClass::Bus, VehicleClass::Motorbike};

std::string to_string(VehicleClass c);
/// Case-insensitive; throws std::invalid_argument on unknown labels.
VehicleClass parse_vehicle_class(const std::string& label);

struct ParkedCar {
  std::string plate;
  Pose2D pose;  // footprint center; length runs along the pose heading
  double length = 4.5;
  double width = 1.8;
  VehicleClass vehicle_class = VehicleClass::Car;

  std::array<Point2D, 4> corners() const;
  std::array<Segment, 4> edges() const;
  bool contains(Point2D p) const;
};

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(Point2D p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

/// Charging station: where the robot docks and where the geo anchor is surveyed.
struct ChargingStation {
  Pose2D pose;
  GeoPoint geo;
  double heading_offset = 0.0;  // orientation of the world frame, counter-clockwise from east
};

struct NoiseProfile {
  double odom_trans_std = 0.02;        // fraction of distance travelled
  double odom_rot_std = 0.02;          // rad per rad turned
  double odom_rot_multiplier = 1.0;    // inflates rotation noise (rotation-blind odometry)
  double odom_rot_bias = 0.0;          // fraction of each rotation the odometry misreports
  double lidar_range_std = 0.01;       // meters
  double gps_std = 10.0;               // meters, per axis
  double compass_std = 0.02;           // radians
};

struct WorldModel {
  Bounds bounds;
  std::vector<Segment> walls;
  std::vector<ParkedCar> parked_cars;
  ChargingStation charging_station;
  NoiseProfile noise;
  std::uint64_t seed = 0;

  /// Geo reference of the world frame implied by the surveyed station anchor.
  GeoReference true_reference() const;

  /// Wall segments plus every car edge.
  std::vector<Segment> obstacle_segments() const;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the scenario JSON; throws ScenarioError naming the offending field.
WorldModel world_from_json(const nlohmann::json& j);
nlohmann::json world_to_json(const WorldModel& w);
WorldModel load_world(const std::filesystem::path& path);
void save_world(const WorldModel& w, const std::filesystem::path& path);

/// Checks bounds containment and footprint overlap; throws ScenarioError.
void validate_world(const WorldModel& w);

}  // namespace haris
