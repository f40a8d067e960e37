#include "haris/particle_filter.hpp"

#include "haris/distance_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace haris {

double ParticleSet::weight_sum() const {
  double s = 0.0;
  for (const auto& p : particles) s += p.weight;
  return s;
}

double ParticleSet::effective_sample_size() const {
  double s2 = 0.0;
  for (const auto& p : particles) s2 += p.weight * p.weight;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

ParticleSet ParticleSet::around(const Pose2D& pose, std::size_t n) {
  ParticleSet ps;
  ps.particles.assign(n, Particle{pose, n > 0 ? 1.0 / static_cast<double>(n) : 0.0});
  return ps;
}

ParticleSet motion_update(const ParticleSet& ps, const Pose2D& odom_delta, const MotionNoise& noise, Rng& rng) {
  ParticleSet out = ps;
  const double trans = std::hypot(odom_delta.x, odom_delta.y);
  const double rot = std::abs(odom_delta.theta);
  const double sigma_t = noise.trans_per_trans * trans + noise.trans_per_rot * rot;
  const double sigma_r = noise.rot_per_rot * rot + noise.rot_per_trans * trans;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& p : out.particles) {
    const double ex = gauss(rng) * sigma_t;
    const double ey = gauss(rng) * sigma_t;
    const double er = gauss(rng) * sigma_r;
    p.pose = compose(p.pose, Pose2D{odom_delta.x + ex, odom_delta.y + ey, odom_delta.theta + er});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Likelihood field

LikelihoodField::LikelihoodField(const GridMap& map, double occupied_threshold, Point2D center,
                                 double half_extent, double max_distance)
    : max_distance_(max_distance) {
  CellIndex lo = world_to_grid_unbounded(map, {center.x - half_extent, center.y - half_extent});
  CellIndex hi = world_to_grid_unbounded(map, {center.x + half_extent, center.y + half_extent});
  lo.col = std::max(lo.col, 0);
  lo.row = std::max(lo.row, 0);
  hi.col = std::min(hi.col, map.width() - 1);
  hi.row = std::min(hi.row, map.height() - 1);
  build(map, occupied_threshold, lo, hi);
}

LikelihoodField::LikelihoodField(const GridMap& map, double occupied_threshold, double max_distance)
    : max_distance_(max_distance) {
  build(map, occupied_threshold, {0, 0}, {map.width() - 1, map.height() - 1});
}

void LikelihoodField::build(const GridMap& map, double occupied_threshold, CellIndex lo, CellIndex hi) {
  resolution_ = map.resolution();
  origin_ = map.origin();
  frame_ = GridMap(map.resolution(), 0, 0, map.origin());
  col0_ = lo.col;
  row0_ = lo.row;
  width_ = std::max(0, hi.col - lo.col + 1);
  height_ = std::max(0, hi.row - lo.row + 1);
  occupied_count_ = 0;
  site_.assign(static_cast<std::size_t>(width_) * height_, -1);
  if (width_ == 0 || height_ == 0) return;

  const double l_thresh = log_odds_from_probability(occupied_threshold);
  std::vector<std::uint8_t> occupied(site_.size(), 0);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (map.log_odds({col0_ + c, row0_ + r}) > l_thresh) {
        occupied[static_cast<std::size_t>(r) * width_ + c] = 1;
        ++occupied_count_;
      }
    }
  }
  if (occupied_count_ == 0) return;

  const DistanceTransform dt = euclidean_distance_transform(occupied, width_, height_);
  // Sites beyond the cap (plus a cell of slack) all read as max_distance.
  const double cap_cells = max_distance_ / resolution_ + 1.5;
  for (std::size_t i = 0; i < site_.size(); ++i)
    if (dt.squared[i] <= cap_cells * cap_cells) site_[i] = dt.nearest[i];
}

double LikelihoodField::distance(Point2D p) const {
  const CellIndex c = world_to_grid_unbounded(frame_, p);
  const int lc = c.col - col0_, lr = c.row - row0_;
  if (lc < 0 || lr < 0 || lc >= width_ || lr >= height_) return max_distance_;
  const int site = site_[static_cast<std::size_t>(lr) * width_ + lc];
  if (site < 0) return max_distance_;
  const int sc = site % width_;
  const int sr = site / width_;
  const double cx = origin_.x + (col0_ + sc + 0.5) * resolution_;
  const double cy = origin_.y + (row0_ + sr + 0.5) * resolution_;
  return std::min(max_distance_, std::hypot(p.x - cx, p.y - cy));
}

// ---------------------------------------------------------------------------

MeasurementResult measurement_update(const ParticleSet& ps, const LaserScan& scan, const LikelihoodField& field,
                                     const MeasurementModel& model) {
  MeasurementResult out{ps, false};
  const std::size_t n = ps.size();
  if (n == 0) return out;
  if (!field.has_obstacles()) {
    for (auto& p : out.particles.particles) p.weight = 1.0 / static_cast<double>(n);
    out.degenerate = true;
    return out;
  }

  std::vector<std::size_t> returns;
  for (std::size_t i = 0; i < scan.ranges.size(); ++i)
    if (scan.is_return(i)) returns.push_back(i);
  if (returns.empty()) return out;
  const std::size_t k = std::min(model.max_beams, returns.size());
  std::vector<Point2D> endpoints(k);  // sensor frame
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = returns[j * returns.size() / k];
    const double a = scan.angle(i);
    endpoints[j] = {scan.ranges[i] * std::cos(a), scan.ranges[i] * std::sin(a)};
  }

  const double inv_two_sigma2 = 1.0 / (2.0 * model.sigma * model.sigma);
  std::vector<double> logw(n);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t pi = 0; pi < n; ++pi) {
    const Particle& p = ps.particles[pi];
    if (!(p.weight > 0.0)) {
      logw[pi] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double ll = 0.0;
    for (const auto& e : endpoints) {
      const double d = field.distance(transform_point(p.pose, e));
      ll -= d * d * inv_two_sigma2;
    }
    logw[pi] = std::log(p.weight) + ll;
    best = std::max(best, logw[pi]);
  }
  if (!std::isfinite(best)) {
    for (auto& p : out.particles.particles) p.weight = 1.0 / static_cast<double>(n);
    out.degenerate = true;
    return out;
  }
  double sum = 0.0;
  for (std::size_t pi = 0; pi < n; ++pi) {
    const double w = std::exp(logw[pi] - best);
    out.particles.particles[pi].weight = w;
    sum += w;
  }
  for (auto& p : out.particles.particles) p.weight /= sum;
  return out;
}

MeasurementResult measurement_update(const ParticleSet& ps, const LaserScan& scan, const GridMap& map,
                                     double occupied_threshold, const MeasurementModel& model) {
  return measurement_update(ps, scan, LikelihoodField(map, occupied_threshold), model);
}

ParticleSet resample_systematic(const ParticleSet& ps, Rng& rng) {
  const std::size_t n = ps.size();
  if (n == 0 || ps.effective_sample_size() >= static_cast<double>(n) / 2.0) return ps;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u0 = uni(rng);
  ParticleSet out;
  out.particles.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  std::size_t i = 0;
  double cumulative = ps.particles[0].weight;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (u0 + static_cast<double>(k)) / static_cast<double>(n);
    while (u >= cumulative && i + 1 < n) {
      ++i;
      cumulative += ps.particles[i].weight;
    }
    out.particles.push_back({ps.particles[i].pose, w});
  }
  return out;
}

ParticleSet resample_systematic(const ParticleSet& ps, std::uint64_t seed) {
  Rng rng(seed);
  return resample_systematic(ps, rng);
}

LocalizationEstimate estimate(const ParticleSet& ps) {
  LocalizationEstimate est;
  double sx = 0.0, sy = 0.0, ss = 0.0, sc = 0.0, sw = 0.0;
  for (const auto& p : ps.particles) {
    sx += p.weight * p.pose.x;
    sy += p.weight * p.pose.y;
    ss += p.weight * std::sin(p.pose.theta);
    sc += p.weight * std::cos(p.pose.theta);
    sw += p.weight;
  }
  if (!(sw > 0.0)) return est;
  const double mx = sx / sw, my = sy / sw;
  double var = 0.0;
  for (const auto& p : ps.particles) {
    const double dx = p.pose.x - mx, dy = p.pose.y - my;
    var += p.weight * (dx * dx + dy * dy);
  }
  est.pose = Pose2D{mx, my, std::atan2(ss, sc)};
  est.position_rms = std::sqrt(var / sw);
  return est;
}

}  // namespace haris
