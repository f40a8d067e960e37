#include "haris/geo.hpp"

#include <cmath>
#include <string>

namespace haris {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
}

double normalize_longitude(double lon) {
  double r = std::remainder(lon, 360.0);
  if (r <= -180.0) r += 360.0;
  return r;
}

GeoPoint make_geo_point(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon))
    throw std::invalid_argument("geo point must be finite");
  if (lat < -90.0 || lat > 90.0)
    throw std::invalid_argument("latitude out of range: " + std::to_string(lat));
  if (lon <= -180.0 || lon > 180.0)
    throw std::invalid_argument("longitude out of range: " + std::to_string(lon));
  return {lat, lon};
}

Point2D to_local(const GeoReference& ref, const GeoPoint& g) {
  const double meters_per_rad = ref.earth_radius;
  const double dlat = g.lat - ref.origin.lat;
  const double dlon = normalize_longitude(g.lon - ref.origin.lon);
  const double east = dlon * kDegToRad * meters_per_rad * std::cos(ref.origin.lat * kDegToRad);
  const double north = dlat * kDegToRad * meters_per_rad;
  if (!(std::hypot(east, north) <= kProjectionRange))
    throw OutOfProjectionRange("point is beyond the 50 km projection range");
  return rotate({east, north}, -ref.heading_offset);
}

GeoPoint to_gps(const GeoReference& ref, Point2D p) {
  if (!(norm(p) <= kProjectionRange))
    throw OutOfProjectionRange("local point is beyond the 50 km projection range");
  const Point2D en = rotate(p, ref.heading_offset);
  const double lat = ref.origin.lat + en.y / (kDegToRad * ref.earth_radius);
  const double lon = ref.origin.lon +
                     en.x / (kDegToRad * ref.earth_radius * std::cos(ref.origin.lat * kDegToRad));
  return {lat, normalize_longitude(lon)};
}

GeoReference resync(const GeoReference& ref, const GeoPoint& station, double station_heading,
                    const Pose2D& measured_pose) {
  GeoReference out = ref;
  out.heading_offset = normalize_angle(station_heading - measured_pose.theta);
  const Point2D en = rotate(measured_pose.position(), out.heading_offset);
  out.origin.lat = station.lat - en.y / (kDegToRad * ref.earth_radius);
  out.origin.lon = normalize_longitude(
      station.lon - en.x / (kDegToRad * ref.earth_radius * std::cos(out.origin.lat * kDegToRad)));
  return out;
}

}  // namespace haris
