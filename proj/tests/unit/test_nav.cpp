#include <cmath>
#include <random>

#include "doctest.h"
#include "haris/costmap.hpp"
#include "haris/dwa.hpp"
#include "haris/navigator.hpp"
#include "haris/planner.hpp"
#include "support/oracles.hpp"

using namespace haris;
using doctest::Approx;

namespace {

GridMap known_free(int w, int h, double res = 0.1) {
  GridMap m(res, w, h, {0, 0});
  for (auto& l : m.cells()) l = -4.0;
  return m;
}

Point2D center(const GridMap& m, int c, int r) { return grid_to_world(m, {c, r}); }

Path goal_path(Point2D goal) {
  Path p;
  p.waypoints.push_back({goal.x, goal.y, 0.0});
  return p;
}

}  // namespace

TEST_CASE("inflation ring around a single lethal cell") {
  GridMap m = known_free(21, 21);
  m.log_odds({10, 10}) = 4.0;
  InflationParams params;
  params.radius = 0.3;
  const Costmap cm = inflate(m, params);
  for (int r = 0; r < 21; ++r)
    for (int c = 0; c < 21; ++c) {
      const double d = std::hypot(c - 10, r - 10) * 0.1;
      const std::uint8_t got = cm.cost({c, r});
      if (d == 0.0) {
        CHECK(got == cost::kLethal);
      } else if (d <= 0.3 + 1e-9) {
        CHECK(got > 0);
        CHECK(got <= cost::kMaxInflated);
        const long want = std::clamp(std::lround(253.0 * std::exp(-params.cost_scaling * d)), 1L, 253L);
        CHECK(got == want);
      } else {
        CHECK(got == cost::kFree);
      }
    }
}

TEST_CASE("inflation decays monotonically and respects the inscribed radius") {
  GridMap m = known_free(30, 30);
  m.log_odds({15, 15}) = 4.0;
  m.log_odds({16, 15}) = 4.0;
  const Costmap cm = inflate(m, {0.8, 0.25, 5.0, false});
  for (int c = 17; c < 29; ++c) {
    const double d = (c - 16) * 0.1;
    if (d < 0.25) CHECK(cm.cost({c, 15}) == cost::kLethal);
    else CHECK(cm.cost({c, 15}) <= cm.cost({c - 1, 15}));
  }
}

TEST_CASE("inflation edge cases") {
  GridMap m = known_free(10, 10);
  Costmap cm = inflate(m, InflationParams{});
  for (auto c : cm.costs()) CHECK(c == cost::kFree);

  m.log_odds({4, 4}) = 4.0;
  m.log_odds({0, 0}) = 0.0;
  cm = inflate(m, {0.0, 0.0, 5.0, false});
  CHECK(cm.cost({4, 4}) == cost::kLethal);
  CHECK(cm.cost({5, 4}) == cost::kFree);
  CHECK(cm.cost({0, 0}) == cost::kUnknown);
  CHECK(inflate(m, {0.0, 0.0, 5.0, true}).cost({0, 0}) == cost::kFree);
  CHECK_THROWS_AS(inflate(m, {-1.0, 0.0, 5.0, false}), std::invalid_argument);
}

TEST_CASE("plan_global examples") {
  const GridMap g = known_free(5, 5, 1.0);
  const Costmap cm = costmap_from_costs(g, std::vector<std::uint8_t>(25, 0));

  const Path same = plan_global(cm, center(g, 2, 2), center(g, 2, 2));
  CHECK(same.waypoints.size() == 1);
  CHECK(same.total_cost == 0.0);

  const Path diag = plan_global(cm, center(g, 0, 0), center(g, 4, 4));
  CHECK(diag.total_cost == Approx(4.0 * std::sqrt(2.0)));
  CHECK(diag.waypoints.size() == 5);
  const auto want = oracle::dijkstra(std::vector<std::uint8_t>(25, 0), 5, 5, 0, 0, 4, 4);
  REQUIRE(want);
  CHECK(diag.exact_cost == PathCost{want->a, want->b});
}

TEST_CASE("plan_global threads a single gap") {
  const int w = 20, h = 20;
  std::vector<std::uint8_t> costs(w * h, 0);
  for (int r = 0; r < h; ++r)
    if (r != 13) costs[r * w + 10] = cost::kLethal;
  const GridMap g = known_free(w, h, 1.0);
  const Costmap cm = costmap_from_costs(g, costs);
  const Path p = plan_global(cm, center(g, 2, 2), center(g, 17, 3));
  bool through_gap = false;
  for (const auto& wp : p.waypoints) {
    const CellIndex c = *world_to_grid(g, wp.position());
    CHECK(cm.cost(c) != cost::kLethal);
    through_gap = through_gap || (c == CellIndex{10, 13});
  }
  CHECK(through_gap);
  const auto want = oracle::dijkstra(costs, w, h, 2, 2, 17, 3);
  REQUIRE(want);
  CHECK(p.exact_cost == PathCost{want->a, want->b});
}

TEST_CASE("plan_global errors") {
  const int w = 10, h = 10;
  std::vector<std::uint8_t> costs(w * h, 0);
  for (int r = 0; r < h; ++r) costs[r * w + 5] = cost::kLethal;
  costs[0] = cost::kUnknown;
  const GridMap g = known_free(w, h, 1.0);
  const Costmap cm = costmap_from_costs(g, costs);
  try {
    plan_global(cm, center(g, 1, 1), center(g, 8, 8));
    FAIL("expected no path");
  } catch (const PlanningError& e) {
    CHECK(e.reason() == PlanningError::Reason::NoPath);
  }
  try {
    plan_global(cm, center(g, 0, 0), center(g, 3, 3));
    FAIL("expected unreachable endpoint");
  } catch (const PlanningError& e) {
    CHECK(e.reason() == PlanningError::Reason::UnreachableEndpoint);
  }
}

TEST_CASE("planned paths are 8-connected, avoid blocked cells and cost at least the straight line") {
  std::mt19937_64 rng(77);
  int planned = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 25, h = 25;
    std::vector<std::uint8_t> costs(w * h);
    for (auto& c : costs) {
      const auto roll = rng() % 100;
      c = roll < 20 ? cost::kLethal : roll < 25 ? cost::kUnknown : static_cast<std::uint8_t>(rng() % 200);
    }
    const GridMap g = known_free(w, h, 1.0);
    const Costmap cm = costmap_from_costs(g, costs);
    const int sc = static_cast<int>(rng() % w), sr = static_cast<int>(rng() % h);
    const int gc = static_cast<int>(rng() % w), gr = static_cast<int>(rng() % h);
    if (!traversable(costs[sr * w + sc]) || !traversable(costs[gr * w + gc])) continue;
    Path p;
    try {
      p = plan_global(cm, center(g, sc, sr), center(g, gc, gr));
    } catch (const PlanningError&) {
      CHECK_FALSE(oracle::dijkstra(costs, w, h, sc, sr, gc, gr));
      continue;
    }
    ++planned;
    CHECK(p.total_cost >= std::hypot(gc - sc, gr - sr) - 1e-9);
    for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
      const CellIndex c = *world_to_grid(g, p.waypoints[i].position());
      CHECK(traversable(cm.cost(c)));
      if (i > 0) {
        const CellIndex prev = *world_to_grid(g, p.waypoints[i - 1].position());
        CHECK(std::max(std::abs(c.col - prev.col), std::abs(c.row - prev.row)) == 1);
      }
    }
  }
  CHECK(planned > 5);
}

TEST_CASE("dwa: straight goal picks the straight arc") {
  const GridMap g = known_free(100, 100);
  const Costmap cm = inflate(g, InflationParams{});
  const Pose2D pose{2, 5, 0};
  const DwaResult r = dwa_step(cm, pose, {0.5, 0.0}, goal_path({9, 5}));
  CHECK_FALSE(r.blocked);
  CHECK(r.twist.omega == 0.0);
  CHECK(r.twist.v > 0.5);
}

TEST_CASE("dwa: wall ahead blocks every fast arc") {
  GridMap g = known_free(100, 100);
  for (int r = 0; r < 100; ++r) g.log_odds({25, r}) = 4.0;  // wall at x = 2.5
  const Costmap cm = inflate(g, {0.6, 0.25, 5.0, false});
  const DwaResult r = dwa_step(cm, {2.0, 5.0, 0.0}, {1.0, 0.0}, goal_path({9, 5}));
  CHECK(r.blocked);
  CHECK(r.twist == Twist{0.0, 0.0});
}

TEST_CASE("dwa: off-axis goal beats the straight arc on heading") {
  const GridMap g = known_free(100, 100);
  const Costmap cm = inflate(g, InflationParams{});
  const Pose2D pose{2, 2, 0};
  const Point2D goal{4, 8};
  DwaParams params;
  const Twist current{0.3, 0.0};
  const DwaResult r = dwa_step(cm, pose, current, goal_path(goal), params);
  REQUIRE_FALSE(r.blocked);

  // Exhaustive oracle: end-heading error of every sample in the window.
  auto end_error = [&](Twist t) {
    const Pose2D end = integrate_unicycle(pose, t, params.horizon);
    return std::abs(normalize_angle(std::atan2(goal.y - end.y, goal.x - end.x) - end.theta));
  };
  const DynamicWindow w = dynamic_window(current, params);
  double best_total = -1.0;
  Twist best{};
  for (const Twist& t : window_samples(w, params)) {
    const double total = params.alpha_heading * (1.0 - end_error(t) / M_PI) + params.beta_clearance * 1.0 +
                          params.gamma_velocity * t.v / params.v_max;
    if (total > best_total + 1e-12 || (total >= best_total - 1e-12 && std::abs(t.omega) < std::abs(best.omega) - 1e-12)) {
      best_total = total;
      best = t;
    }
  }
  CHECK(r.twist.v == Approx(best.v));
  CHECK(r.twist.omega == Approx(best.omega));
  CHECK(end_error(r.twist) < end_error({r.twist.v, 0.0}));
}

TEST_CASE("dwa output stays in the window and off lethal cells") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(1.0, 9.0), ang(-M_PI, M_PI), vel(0.0, 1.0), om(-1.5, 1.5);
  GridMap g = known_free(100, 100);
  for (int k = 0; k < 60; ++k) g.log_odds({static_cast<int>(rng() % 100), static_cast<int>(rng() % 100)}) = 4.0;
  const Costmap cm = inflate(g, {0.6, 0.25, 5.0, false});
  const DwaParams params;
  int moving = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Pose2D pose{pos(rng), pos(rng), ang(rng)};
    if (cm.lethal_at(pose.position())) continue;
    const Twist current{vel(rng), om(rng)};
    const DwaResult r = dwa_step(cm, pose, current, goal_path({pos(rng), pos(rng)}), params);
    if (r.blocked) {
      CHECK(r.twist == Twist{});
      continue;
    }
    ++moving;
    CHECK(dynamic_window(current, params).contains(r.twist));
    for (const Pose2D& q : simulate_arc(pose, r.twist, params)) CHECK_FALSE(cm.lethal_at(q.position()));
  }
  CHECK(moving > 50);
}

TEST_CASE("dwa parameter validation") {
  DwaParams p;
  CHECK_NOTHROW(p.validate());
  p.horizon = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(dwa_step(Costmap{}, {}, {}, Path{}), std::invalid_argument);
}

TEST_CASE("navigator drives to a goal on a known map") {
  GridMap g = known_free(80, 40);
  for (int r = 0; r < 30; ++r) g.log_odds({40, r}) = 4.0;  // wall with an opening at the top
  Navigator nav;
  Pose2D pose{1.0, 1.0, 0.0};
  Twist current{};
  const Point2D goal{7.0, 1.0};
  double t = 0.0;
  bool arrived = false;
  for (int i = 0; i < 2000 && !arrived; ++i, t += 0.05) {
    const NavCommand cmd = nav.step(g, pose, current, goal, t);
    CHECK(cmd.status != NavStatus::NoPath);
    current = cmd.twist;
    pose = integrate_unicycle(pose, current, 0.05);
    CHECK(g.log_odds(*world_to_grid(g, pose.position())) < 0.0);
    arrived = distance(pose.position(), goal) < 0.2;
  }
  CHECK(arrived);
}

TEST_CASE("nearest traversable cell") {
  std::vector<std::uint8_t> costs(100, 0);
  costs[5 * 10 + 5] = cost::kLethal;
  const GridMap g = known_free(10, 10, 0.1);
  const Costmap cm = costmap_from_costs(g, costs);
  const Point2D p = center(g, 5, 5);
  const auto q = nearest_traversable(cm, p, 0.15);
  REQUIRE(q);
  CHECK(distance(*q, p) == Approx(0.1));
  CHECK(nearest_traversable(cm, center(g, 1, 1), 0.5) == center(g, 1, 1));
  CHECK_FALSE(nearest_traversable(cm, p, 0.05));
}
