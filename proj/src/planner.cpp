#include "haris/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace haris {

double PathCost::value() const {
  return (static_cast<double>(a) + static_cast<double>(b) * std::numbers::sqrt2) / 128.0;
}

std::strong_ordering operator<=>(const PathCost& x, const PathCost& y) {
  const std::int64_t da = x.a - y.a;
  const std::int64_t db = x.b - y.b;
  // sign of da + db*sqrt(2)
  if (da >= 0 && db >= 0) return (da == 0 && db == 0) ? std::strong_ordering::equal : std::strong_ordering::greater;
  if (da <= 0 && db <= 0) return std::strong_ordering::less;
  const __int128 a2 = static_cast<__int128>(da) * da;
  const __int128 b2 = static_cast<__int128>(db) * db * 2;
  if (da > 0) return a2 > b2 ? std::strong_ordering::greater : std::strong_ordering::less;
  return b2 > a2 ? std::strong_ordering::greater : std::strong_ordering::less;
}

PathCost PathCost::step(bool diagonal, std::uint8_t cell_cost) {
  const std::int64_t w = 128 + static_cast<std::int64_t>(cell_cost);
  return diagonal ? PathCost{0, w} : PathCost{w, 0};
}

PathCost PathCost::octile(int dcol, int drow) {
  const std::int64_t dx = std::abs(dcol), dy = std::abs(drow);
  const std::int64_t lo = std::min(dx, dy), hi = std::max(dx, dy);
  return {128 * (hi - lo), 128 * lo};
}

namespace {

struct OpenEntry {
  PathCost f;
  PathCost g;
  std::size_t index;
};

// Min-heap on f; among equal f prefer larger g (closer to the goal), then lower index.
struct OpenOrder {
  bool operator()(const OpenEntry& x, const OpenEntry& y) const {
    if (x.f != y.f) return x.f > y.f;
    if (x.g != y.g) return x.g < y.g;
    return x.index > y.index;
  }
};

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace

Path plan_global(const Costmap& cm, Point2D start, Point2D goal) {
  const GridMap& geo = cm.geometry();
  const auto s = world_to_grid(geo, start);
  const auto t = world_to_grid(geo, goal);
  if (!s || !t) throw PlanningError(PlanningError::Reason::UnreachableEndpoint, "endpoint outside the map");
  if (!traversable(cm.cost(*s)) || !traversable(cm.cost(*t)))
    throw PlanningError(PlanningError::Reason::UnreachableEndpoint, "endpoint in lethal or unknown cell");

  const int w = cm.width();
  const std::size_t n = static_cast<std::size_t>(w) * cm.height();
  const std::size_t si = geo.index(*s), ti = geo.index(*t);

  std::vector<PathCost> g(n);
  std::vector<std::uint8_t> state(n, 0);  // 0 unseen, 1 open, 2 closed
  std::vector<std::int32_t> parent(n, -1);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;

  g[si] = {};
  state[si] = 1;
  open.push({PathCost::octile(t->col - s->col, t->row - s->row), {}, si});

  bool found = false;
  while (!open.empty()) {
    const OpenEntry cur = open.top();
    open.pop();
    if (state[cur.index] == 2 || cur.g != g[cur.index]) continue;
    state[cur.index] = 2;
    if (cur.index == ti) {
      found = true;
      break;
    }
    const int cc = static_cast<int>(cur.index % w), cr = static_cast<int>(cur.index / w);
    for (int k = 0; k < 8; ++k) {
      const CellIndex nb{cc + kDx[k], cr + kDy[k]};
      if (!geo.in_bounds(nb)) continue;
      const std::size_t ni = geo.index(nb);
      if (state[ni] == 2 || !traversable(cm.cost(nb))) continue;
      const bool diagonal = k >= 4;
      if (diagonal && (!traversable(cm.cost({cc + kDx[k], cr})) || !traversable(cm.cost({cc, cr + kDy[k]}))))
        continue;
      const PathCost ng = cur.g + PathCost::step(diagonal, cm.cost(nb));
      if (state[ni] == 1 && !(ng < g[ni])) continue;
      g[ni] = ng;
      parent[ni] = static_cast<std::int32_t>(cur.index);
      state[ni] = 1;
      open.push({ng + PathCost::octile(t->col - nb.col, t->row - nb.row), ng, ni});
    }
  }
  if (!found) throw PlanningError(PlanningError::Reason::NoPath, "no path");

  std::vector<std::size_t> cells;
  for (std::int64_t i = static_cast<std::int64_t>(ti); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    cells.push_back(static_cast<std::size_t>(i));
    if (static_cast<std::size_t>(i) == si) break;
  }
  std::reverse(cells.begin(), cells.end());

  Path path;
  path.exact_cost = g[ti];
  path.total_cost = g[ti].value();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const CellIndex c{static_cast<int>(cells[k] % w), static_cast<int>(cells[k] / w)};
    const Point2D p = grid_to_world(geo, c);
    double heading = path.waypoints.empty() ? 0.0 : path.waypoints.back().theta;
    if (k + 1 < cells.size()) {
      const CellIndex nx{static_cast<int>(cells[k + 1] % w), static_cast<int>(cells[k + 1] / w)};
      heading = std::atan2(nx.row - c.row, nx.col - c.col);
    }
    path.waypoints.push_back({p.x, p.y, heading});
  }
  return path;
}

}  // namespace haris
