#include "haris/alpr.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace haris {

double CameraModel::p_detect(double d) const {
  const auto& c = p_detect_curve;
  if (c.empty()) return 0.0;
  if (d <= c.front().first) return c.front().second;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (d <= c[i].first) {
      const double span = c[i].first - c[i - 1].first;
      const double t = span > 0.0 ? (d - c[i - 1].first) / span : 1.0;
      return c[i - 1].second + t * (c[i].second - c[i - 1].second);
    }
  }
  return c.back().second;
}

void CameraModel::validate() const {
  if (!(fov > 0.0) || !(max_range > 0.0)) throw std::invalid_argument("camera: fov and max_range must be positive");
  if (!(light_level > 0.0 && light_level <= 1.0)) throw std::invalid_argument("camera: light_level must be in (0, 1]");
  if (ocr_char_error_rate < 0.0 || ocr_char_error_rate > 1.0)
    throw std::invalid_argument("camera: ocr_char_error_rate must be in [0, 1]");
  for (std::size_t i = 0; i < p_detect_curve.size(); ++i) {
    const auto& [d, p] = p_detect_curve[i];
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("camera: p_detect values must be in [0, 1]");
    if (i > 0 && d < p_detect_curve[i - 1].first)
      throw std::invalid_argument("camera: p_detect distances must be non-decreasing");
  }
}

std::string corrupt_plate(const std::string& plate, double rate, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> other(0, 8);
  std::string out = plate;
  for (char& ch : out) {
    if (u(rng) >= rate) continue;
    const int original = (ch >= '0' && ch <= '9') ? ch - '0' : -1;
    int digit = other(rng);
    if (original >= 0 && digit >= original) ++digit;
    ch = static_cast<char>('0' + digit);
  }
  return out;
}

std::vector<Sighting> observe(const WorldModel& world, const ObserveContext& ctx, const CameraModel& cam,
                              const ModuleGates& gates, Rng& rng) {
  std::vector<Sighting> out;
  if (!gates.alpr_active) return out;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Pose2D camera = compose(ctx.true_pose, cam.mount);
  for (const auto& car : world.parked_cars) {
    const Point2D rel = transform_point(inverse(camera), car.pose.position());
    const double d = norm(rel);
    if (d > cam.max_range) continue;
    if (std::abs(std::atan2(rel.y, rel.x)) > cam.fov / 2.0) continue;
    const double p = std::clamp(cam.p_detect(d) * cam.light_level, 0.0, 1.0);
    if (!(u(rng) < p)) continue;

    Sighting s;
    s.true_plate = car.plate;
    s.plate_read = corrupt_plate(car.plate, cam.ocr_char_error_rate, rng);
    s.confidence = p;
    s.robot_pose = ctx.estimated_pose;
    s.local_position = transform_point(compose(ctx.estimated_pose, cam.mount), rel);
    s.car_position = to_gps(ctx.reference, s.local_position);
    s.timestamp = ctx.timestamp;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sighting> observe(const WorldModel& world, const Pose2D& pose, const CameraModel& cam,
                              const ModuleGates& gates, std::uint64_t seed) {
  Rng rng(seed);
  return observe(world, ObserveContext{pose, pose, world.true_reference(), 0}, cam, gates, rng);
}

}  // namespace haris
