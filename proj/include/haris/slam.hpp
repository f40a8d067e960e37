#pragma once

#include <cstdint>

#include "haris/grid_map.hpp"
#include "haris/laser_scan.hpp"
#include "haris/mapping.hpp"
#include "haris/particle_filter.hpp"
#include "haris/rng.hpp"

namespace haris {

struct SlamConfig {
  std::size_t particles = 500;
  MappingParams mapping;
  MotionNoise motion;
  MeasurementModel measurement;
  double update_distance = 0.1;  // filter runs after this much travel...
  double update_angle = 0.1;     // ...or this much rotation
  double field_max_distance = 1.0;
};

/// Sequential mapping + localization task. The map is shared by all particles
/// and grown from the filter estimate.
class SlamPipeline {
 public:
  SlamPipeline(GridMap map, const Pose2D& initial_pose, SlamConfig config, std::uint64_t seed);

  /// Accumulates an odometry increment (in the previous body frame).
  void on_odometry(const Pose2D& delta);

  /// Runs a filter update and integrates the scan when enough motion has
  /// accumulated (always on the first scan). Returns true if it did.
  bool on_scan(const LaserScan& scan);

  /// Latest filter estimate advanced by the odometry received since.
  LocalizationEstimate estimate() const;

  const GridMap& map() const { return map_; }
  const ParticleSet& particles() const { return particles_; }
  const SlamConfig& config() const { return config_; }
  bool last_update_degenerate() const { return last_degenerate_; }
  std::size_t update_count() const { return updates_; }

 private:
  GridMap map_;
  SlamConfig config_;
  Rng rng_;
  ParticleSet particles_;
  LocalizationEstimate filtered_;
  Pose2D pending_;
  bool have_map_ = false;
  bool last_degenerate_ = false;
  std::size_t updates_ = 0;
};

}  // namespace haris
