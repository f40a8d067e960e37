#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "haris/geometry.hpp"

namespace haris {

struct CellIndex {
  int col = 0;
  int row = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

inline double probability_from_log_odds(double l) { return 1.0 - 1.0 / (1.0 + std::exp(l)); }
inline double log_odds_from_probability(double p) { return std::log(p / (1.0 - p)); }

/// Log-odds occupancy raster. Cell (0,0) has its lower-left corner at `origin`;
/// rows grow along +y.
class GridMap {
 public:
  GridMap() = default;
  GridMap(double resolution, int width, int height, Point2D origin);

  double resolution() const { return resolution_; }
  int width() const { return width_; }
  int height() const { return height_; }
  Point2D origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  bool in_bounds(CellIndex c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }

  double log_odds(CellIndex c) const { return cells_[index(c)]; }
  double& log_odds(CellIndex c) { return cells_[index(c)]; }
  double probability(CellIndex c) const { return probability_from_log_odds(log_odds(c)); }

  const std::vector<double>& cells() const { return cells_; }
  std::vector<double>& cells() { return cells_; }

  /// Lower-left corner of the cell column/row boundary k along one axis.
  double corner_x(int col) const { return origin_.x + col * resolution_; }
  double corner_y(int row) const { return origin_.y + row * resolution_; }

 private:
  double resolution_ = 0.05;
  int width_ = 0;
  int height_ = 0;
  Point2D origin_;
  std::vector<double> cells_;
};

/// Cell containing p; points on a cell boundary belong to the higher index.
/// Returns nullopt when p falls outside the map.
std::optional<CellIndex> world_to_grid(const GridMap& map, Point2D p);

/// Unchecked variant: may return indices outside the map.
CellIndex world_to_grid_unbounded(const GridMap& map, Point2D p);

/// Center of the cell.
Point2D grid_to_world(const GridMap& map, CellIndex c);

struct OccupancyThresholds {
  double occupied = 0.65;
  double free = 0.25;
};

/// ROS map_server-style export: 8-bit P5 PGM (0 occupied, 254 free, 205 unknown)
/// plus a YAML sidecar with resolution and origin. Returns the sidecar path.
std::filesystem::path save_pgm(const GridMap& map, const std::filesystem::path& pgm_path,
                               OccupancyThresholds thresholds = {});

/// Reads a map written by save_pgm. Occupied and free pixels load as +/- `saturation` log-odds.
GridMap load_pgm(const std::filesystem::path& sidecar_path, double saturation = 4.0);

/// In-memory PGM bytes (header + raster, top row first).
std::string encode_pgm(const GridMap& map, OccupancyThresholds thresholds = {});

}  // namespace haris
