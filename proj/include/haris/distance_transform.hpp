#pragma once

#include <cstdint>
#include <vector>

namespace haris {

struct DistanceTransform {
  std::vector<double> squared;  // squared distance in cells; >= kFar/2 when no site exists
  std::vector<int> nearest;     // linear index of the nearest site, -1 when none

  static constexpr double kFar = 1e20;
};

/// Exact Euclidean distance transform over a width x height raster (row-major)
/// where `is_site` marks the source cells.
DistanceTransform euclidean_distance_transform(const std::vector<std::uint8_t>& is_site, int width, int height);

}  // namespace haris
