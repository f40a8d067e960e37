#pragma once

#include <stdexcept>

#include "haris/geometry.hpp"

namespace haris {

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, (-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Wraps a longitude into (-180, 180].
double normalize_longitude(double lon);

/// Throws std::invalid_argument when lat/lon are out of range or not finite.
GeoPoint make_geo_point(double lat, double lon);

class OutOfProjectionRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kEarthRadius = 6371000.0;
inline constexpr double kProjectionRange = 50000.0;

/// Anchors the robot's local metric frame to the globe.
///
/// The local frame is the east/north tangent plane at `origin` rotated
/// counter-clockwise by `heading_offset`: with heading_offset = 0 the local
/// x axis points east and y north; with pi/2, x points north.
struct GeoReference {
  GeoPoint origin;
  double heading_offset = 0.0;
  double earth_radius = kEarthRadius;

  friend bool operator==(const GeoReference&, const GeoReference&) = default;
};

/// Converts a compass bearing (clockwise from true north) of the local x axis
/// into the counter-clockwise-from-east heading_offset, and back.
inline double heading_offset_from_bearing(double bearing) {
  return normalize_angle(M_PI / 2.0 - bearing);
}
inline double bearing_from_heading_offset(double heading_offset) {
  return normalize_angle(M_PI / 2.0 - heading_offset);
}

/// Equirectangular projection into the local frame. Throws OutOfProjectionRange
/// beyond 50 km from the origin.
Point2D to_local(const GeoReference& ref, const GeoPoint& g);

/// Exact inverse of to_local.
GeoPoint to_gps(const GeoReference& ref, Point2D p);

/// Re-anchors the transform so that `measured_pose` (the robot's belief while
/// docked) maps to `station`, with the robot's heading mapping to
/// `station_heading` (same counter-clockwise-from-east convention as
/// heading_offset). The local frame itself is untouched.
GeoReference resync(const GeoReference& ref, const GeoPoint& station, double station_heading,
                    const Pose2D& measured_pose);

}  // namespace haris
