#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "haris/grid_map.hpp"

namespace haris {

namespace cost {
inline constexpr std::uint8_t kFree = 0;
inline constexpr std::uint8_t kMaxInflated = 253;
inline constexpr std::uint8_t kLethal = 254;
inline constexpr std::uint8_t kUnknown = 255;
}  // namespace cost

struct InflationParams {
  double radius = 0.6;            // cost decays to zero at this distance
  double inscribed_radius = 0.0;  // cells closer than this to an obstacle are lethal
  double cost_scaling = 5.0;      // exponential decay rate, 1/m
  bool unknown_as_free = false;   // optimistic planning through unmapped space
};

/// Per-cell traversal cost derived from an occupancy map.
class Costmap {
 public:
  Costmap() = default;
  Costmap(const GridMap& geometry, std::vector<std::uint8_t> costs, std::vector<float> clearance);

  const GridMap& geometry() const { return geometry_; }
  int width() const { return geometry_.width(); }
  int height() const { return geometry_.height(); }
  double resolution() const { return geometry_.resolution(); }

  std::uint8_t cost(CellIndex c) const { return costs_[geometry_.index(c)]; }
  /// Cost at a world point; lethal outside the map.
  std::uint8_t cost_at(Point2D p) const;
  bool lethal_at(Point2D p) const { return cost_at(p) == cost::kLethal; }
  /// Meters from the cell to the nearest obstacle cell (capped).
  double clearance_at(Point2D p) const;

  const std::vector<std::uint8_t>& costs() const { return costs_; }

 private:
  GridMap geometry_;  // carries resolution/size/origin; its cells are unused
  std::vector<std::uint8_t> costs_;
  std::vector<float> clearance_;
};

/// Builds a costmap: occupied cells lethal, a decaying ring out to `radius`,
/// unknown cells marked unknown.
Costmap inflate(const GridMap& map, const InflationParams& params, OccupancyThresholds thresholds = {});

/// Costmap from raw cost values (tests and tools).
Costmap costmap_from_costs(const GridMap& geometry, std::vector<std::uint8_t> costs);

}  // namespace haris
