#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "haris/costmap.hpp"
#include "haris/geometry.hpp"

namespace haris {

/// Exact grid path cost (a + b*sqrt(2)) / 128 in cell units. Straight steps
/// add to `a`, diagonal steps to `b`, each weighted by (128 + cell cost).
/// Comparisons are exact, so equal-cost paths compare equal regardless of
/// summation order.
struct PathCost {
  std::int64_t a = 0;
  std::int64_t b = 0;

  double value() const;
  friend PathCost operator+(PathCost x, PathCost y) { return {x.a + y.a, x.b + y.b}; }
  friend bool operator==(const PathCost&, const PathCost&) = default;
  friend std::strong_ordering operator<=>(const PathCost& x, const PathCost& y);

  /// Cost of stepping into a cell with cost `cell_cost`.
  static PathCost step(bool diagonal, std::uint8_t cell_cost);
  /// Octile lower bound between two cells.
  static PathCost octile(int dcol, int drow);
};

struct Path {
  std::vector<Pose2D> waypoints;
  double total_cost = 0.0;  // cell units
  PathCost exact_cost;
};

class PlanningError : public std::runtime_error {
 public:
  enum class Reason { UnreachableEndpoint, NoPath };
  PlanningError(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// True when the planner may enter the cell.
inline bool traversable(std::uint8_t c) { return c != cost::kLethal && c != cost::kUnknown; }

/// A* on the 8-connected grid. Diagonal steps require both adjacent
/// orthogonal cells to be traversable. Edge cost is step length times
/// (1 + cost/128) of the entered cell; octile heuristic.
Path plan_global(const Costmap& cm, Point2D start, Point2D goal);

}  // namespace haris
