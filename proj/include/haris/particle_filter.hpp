#pragma once

#include <cstddef>
#include <vector>

#include "haris/geometry.hpp"
#include "haris/grid_map.hpp"
#include "haris/laser_scan.hpp"
#include "haris/rng.hpp"

namespace haris {

struct Particle {
  Pose2D pose;
  double weight = 0.0;
};

/// Weighted pose hypotheses. Weights are kept normalized.
struct ParticleSet {
  std::vector<Particle> particles;

  std::size_t size() const { return particles.size(); }
  double weight_sum() const;
  double effective_sample_size() const;

  /// n copies of `pose` with uniform weight.
  static ParticleSet around(const Pose2D& pose, std::size_t n);
};

/// Odometry error model of the filter: standard deviations grow with the
/// distance travelled and the angle turned.
struct MotionNoise {
  double trans_per_trans = 0.05;  // m per m
  double trans_per_rot = 0.01;    // m per rad
  double rot_per_rot = 0.1;       // rad per rad
  double rot_per_trans = 0.005;   // rad per m
};

ParticleSet motion_update(const ParticleSet& ps, const Pose2D& odom_delta, const MotionNoise& noise, Rng& rng);

/// Distance from each cell to the nearest occupied cell, computed over a
/// window of the map and capped at max_distance.
class LikelihoodField {
 public:
  LikelihoodField() = default;

  /// Window is the cell-aligned box covering [center ± half_extent].
  LikelihoodField(const GridMap& map, double occupied_threshold, Point2D center, double half_extent,
                  double max_distance = 1.0);
  /// Covers the whole map.
  LikelihoodField(const GridMap& map, double occupied_threshold, double max_distance = 1.0);

  /// Meters to the nearest occupied cell center; max_distance outside the window.
  double distance(Point2D p) const;
  bool has_obstacles() const { return occupied_count_ > 0; }
  double max_distance() const { return max_distance_; }

 private:
  void build(const GridMap& map, double occupied_threshold, CellIndex lo, CellIndex hi);

  double resolution_ = 0.05;
  Point2D origin_;
  int col0_ = 0, row0_ = 0, width_ = 0, height_ = 0;
  double max_distance_ = 1.0;
  std::size_t occupied_count_ = 0;
  GridMap frame_;  // geometry of the parent map, no cells
  std::vector<int> site_;  // nearest occupied cell (window-local linear index), -1 if none nearby
};

struct MeasurementModel {
  double sigma = 0.2;           // meters
  std::size_t max_beams = 60;
};

struct MeasurementResult {
  ParticleSet particles;
  bool degenerate = false;
};

/// Likelihood-field reweighting with exp(-d^2 / 2 sigma^2) per used beam.
MeasurementResult measurement_update(const ParticleSet& ps, const LaserScan& scan, const LikelihoodField& field,
                                     const MeasurementModel& model = {});

/// Convenience overload building a whole-map field.
MeasurementResult measurement_update(const ParticleSet& ps, const LaserScan& scan, const GridMap& map,
                                     double occupied_threshold = 0.65, const MeasurementModel& model = {});

/// Systematic resampling, applied only when N_eff < N/2. Output weights are uniform.
ParticleSet resample_systematic(const ParticleSet& ps, Rng& rng);
ParticleSet resample_systematic(const ParticleSet& ps, std::uint64_t seed);

struct LocalizationEstimate {
  Pose2D pose;
  double position_rms = 0.0;
};

/// Weighted mean position, circular-mean heading.
LocalizationEstimate estimate(const ParticleSet& ps);

}  // namespace haris
