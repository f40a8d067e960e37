#include "haris/slam.hpp"

#include <cmath>

namespace haris {

SlamPipeline::SlamPipeline(GridMap map, const Pose2D& initial_pose, SlamConfig config, std::uint64_t seed)
    : map_(std::move(map)), config_(config), rng_(seed),
      particles_(ParticleSet::around(initial_pose, config.particles)) {
  config_.mapping.validate();
  filtered_.pose = initial_pose;
}

void SlamPipeline::on_odometry(const Pose2D& delta) { pending_ = compose(pending_, delta); }

bool SlamPipeline::on_scan(const LaserScan& scan) {
  if (!have_map_) {
    integrate_scan(map_, filtered_.pose, scan, config_.mapping);
    have_map_ = true;
    ++updates_;
    return true;
  }
  const double moved = std::hypot(pending_.x, pending_.y);
  if (moved < config_.update_distance && std::abs(pending_.theta) < config_.update_angle) return false;

  particles_ = motion_update(particles_, pending_, config_.motion, rng_);
  pending_ = Pose2D::identity();

  const Point2D center = haris::estimate(particles_).pose.position();
  const LikelihoodField field(map_, config_.mapping.occupied_threshold, center,
                              scan.range_max + config_.field_max_distance + 1.0, config_.field_max_distance);
  MeasurementResult m = measurement_update(particles_, scan, field, config_.measurement);
  last_degenerate_ = m.degenerate;
  filtered_ = haris::estimate(m.particles);
  particles_ = resample_systematic(m.particles, rng_);

  integrate_scan(map_, filtered_.pose, scan, config_.mapping);
  ++updates_;
  return true;
}

LocalizationEstimate SlamPipeline::estimate() const {
  return {compose(filtered_.pose, pending_), filtered_.position_rms};
}

}  // namespace haris
