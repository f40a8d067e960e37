#pragma once

#include <functional>

#include "haris/grid_map.hpp"
#include "haris/laser_scan.hpp"

namespace haris {

struct MappingParams {
  double l_occ = 0.85;
  double l_free = -0.4;
  double clamp = 4.0;
  double occupied_threshold = 0.65;
  double free_threshold = 0.25;

  void validate() const;
  OccupancyThresholds thresholds() const { return {occupied_threshold, free_threshold}; }
};

/// Visits the cells crossed by the segment from `from` to `to`, in order,
/// excluding the cells that contain the two end points. Stops at the map edge.
void traverse_cells(const GridMap& map, Point2D from, Point2D to,
                    const std::function<void(CellIndex)>& visit);

/// Log-odds update for one scan taken at `pose`: cells between the sensor cell
/// and each beam end get l_free, the cell containing a returned endpoint gets
/// l_occ. No-return beams carve free space out to range_max.
void integrate_scan(GridMap& map, const Pose2D& pose, const LaserScan& scan, const MappingParams& params);

/// Pure variant.
inline GridMap integrate_scan(const GridMap& map, const Pose2D& pose, const LaserScan& scan,
                              const MappingParams& params) {
  GridMap out = map;
  integrate_scan(out, pose, scan, params);
  return out;
}

}  // namespace haris
