#include "haris/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "haris/distance_transform.hpp"

namespace haris {

namespace {
constexpr float kClearanceCap = 100.0f;
}

Costmap::Costmap(const GridMap& geometry, std::vector<std::uint8_t> costs, std::vector<float> clearance)
    : geometry_(geometry.resolution(), 0, 0, geometry.origin()), costs_(std::move(costs)),
      clearance_(std::move(clearance)) {
  // Keep dimensions without duplicating the log-odds raster.
  geometry_ = GridMap(geometry.resolution(), geometry.width(), geometry.height(), geometry.origin());
  geometry_.cells().clear();
  geometry_.cells().shrink_to_fit();
  const std::size_t n = static_cast<std::size_t>(geometry.width()) * geometry.height();
  if (costs_.size() != n || clearance_.size() != n) throw std::invalid_argument("costmap size mismatch");
}

std::uint8_t Costmap::cost_at(Point2D p) const {
  auto c = world_to_grid(geometry_, p);
  if (!c) return cost::kLethal;
  return costs_[geometry_.index(*c)];
}

double Costmap::clearance_at(Point2D p) const {
  auto c = world_to_grid(geometry_, p);
  if (!c) return 0.0;
  return clearance_[geometry_.index(*c)];
}

Costmap inflate(const GridMap& map, const InflationParams& params, OccupancyThresholds thresholds) {
  if (!(params.radius >= 0.0)) throw std::invalid_argument("inflation radius must be >= 0");
  const int w = map.width(), h = map.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const double l_occ = log_odds_from_probability(thresholds.occupied);
  const double l_free = log_odds_from_probability(thresholds.free);

  std::vector<std::uint8_t> occupied(n, 0);
  for (std::size_t i = 0; i < n; ++i) occupied[i] = map.cells()[i] > l_occ ? 1 : 0;
  const DistanceTransform dt = euclidean_distance_transform(occupied, w, h);

  const double res = map.resolution();
  const double eps = 1e-9;
  std::vector<std::uint8_t> costs(n, cost::kFree);
  std::vector<float> clearance(n, kClearanceCap);
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_site = dt.nearest[i] >= 0;
    const double d = has_site ? std::sqrt(dt.squared[i]) * res : 1e300;
    if (has_site) clearance[i] = static_cast<float>(std::min<double>(d, kClearanceCap));
    const double l = map.cells()[i];
    if (occupied[i]) {
      costs[i] = cost::kLethal;
    } else if (has_site && params.inscribed_radius > 0.0 && d < params.inscribed_radius - eps) {
      costs[i] = cost::kLethal;
    } else if (!params.unknown_as_free && l >= l_free && l <= l_occ) {
      costs[i] = cost::kUnknown;
    } else if (has_site && d <= params.radius + eps) {
      const double decay = std::exp(-params.cost_scaling * std::max(0.0, d - params.inscribed_radius));
      costs[i] = static_cast<std::uint8_t>(std::clamp(std::lround(cost::kMaxInflated * decay), 1L, 253L));
    }
  }
  return Costmap(map, std::move(costs), std::move(clearance));
}

Costmap costmap_from_costs(const GridMap& geometry, std::vector<std::uint8_t> costs) {
  const int w = geometry.width(), h = geometry.height();
  std::vector<std::uint8_t> lethal(costs.size(), 0);
  for (std::size_t i = 0; i < costs.size(); ++i) lethal[i] = costs[i] == cost::kLethal ? 1 : 0;
  const DistanceTransform dt = euclidean_distance_transform(lethal, w, h);
  std::vector<float> clearance(costs.size(), kClearanceCap);
  for (std::size_t i = 0; i < costs.size(); ++i)
    if (dt.nearest[i] >= 0)
      clearance[i] = static_cast<float>(std::min<double>(std::sqrt(dt.squared[i]) * geometry.resolution(), kClearanceCap));
  return Costmap(geometry, std::move(costs), std::move(clearance));
}

}  // namespace haris
