#include "haris/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace haris {

void MappingParams::validate() const {
  if (!(l_occ > 0.0 && l_free < 0.0)) throw std::invalid_argument("mapping: need l_occ > 0 > l_free");
  if (!(clamp > std::abs(l_occ))) throw std::invalid_argument("mapping: clamp must exceed |l_occ|");
}

void traverse_cells(const GridMap& map, Point2D from, Point2D to,
                    const std::function<void(CellIndex)>& visit) {
  const CellIndex start = world_to_grid_unbounded(map, from);
  const CellIndex end = world_to_grid_unbounded(map, to);
  if (start == end) return;

  const double res = map.resolution();
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();

  const double next_x = map.corner_x(start.col + (step_x > 0 ? 1 : 0));
  const double next_y = map.corner_y(start.row + (step_y > 0 ? 1 : 0));
  double t_max_x = step_x != 0 ? (next_x - from.x) / dx : inf;
  double t_max_y = step_y != 0 ? (next_y - from.y) / dy : inf;
  const double t_delta_x = step_x != 0 ? res / std::abs(dx) : inf;
  const double t_delta_y = step_y != 0 ? res / std::abs(dy) : inf;

  CellIndex c = start;
  const int max_steps = std::abs(end.col - start.col) + std::abs(end.row - start.row);
  for (int i = 0; i < max_steps; ++i) {
    if (t_max_x < t_max_y) {
      c.col += step_x;
      t_max_x += t_delta_x;
    } else {
      c.row += step_y;
      t_max_y += t_delta_y;
    }
    if (c == end || !map.in_bounds(c)) return;
    visit(c);
  }
}

void integrate_scan(GridMap& map, const Pose2D& pose, const LaserScan& scan, const MappingParams& params) {
  const Point2D origin = pose.position();
  const double lo = -params.clamp, hi = params.clamp;
  auto add = [&](CellIndex c, double delta) {
    double& l = map.log_odds(c);
    l = std::clamp(l + delta, lo, hi);
  };
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const bool hit = scan.is_return(i);
    const double r = hit ? scan.ranges[i] : scan.range_max;
    const double a = pose.theta + scan.angle(i);
    const Point2D end{origin.x + r * std::cos(a), origin.y + r * std::sin(a)};
    traverse_cells(map, origin, end, [&](CellIndex c) { add(c, params.l_free); });
    if (hit) {
      if (auto c = world_to_grid(map, end); c && !(*c == world_to_grid_unbounded(map, origin)))
        add(*c, params.l_occ);
    } else if (auto c = world_to_grid(map, end); c && !(*c == world_to_grid_unbounded(map, origin))) {
      add(*c, params.l_free);
    }
  }
}

}  // namespace haris
