#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace haris {

/// One planar range sweep. A range greater than range_max means "no return".
struct LaserScan {
  double angle_min = -M_PI;
  double angle_max = M_PI;
  double angle_increment = M_PI / 180.0;
  double range_max = 12.0;
  std::vector<double> ranges;

  static std::size_t beam_count(double angle_min, double angle_max, double angle_increment) {
    return static_cast<std::size_t>(std::floor((angle_max - angle_min) / angle_increment + 1e-9)) + 1;
  }
  std::size_t beam_count() const { return beam_count(angle_min, angle_max, angle_increment); }

  double no_return_value() const { return range_max + 1.0; }
  bool is_return(std::size_t i) const { return ranges[i] <= range_max; }
  double angle(std::size_t i) const { return angle_min + static_cast<double>(i) * angle_increment; }
};

/// Beam layout without ranges; used to request a simulated scan.
struct ScanSpec {
  double angle_min = -M_PI;
  double angle_max = M_PI - M_PI / 180.0;
  double angle_increment = M_PI / 180.0;
  double range_max = 12.0;
};

}  // namespace haris
