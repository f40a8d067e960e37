#include <cmath>

#include "doctest.h"
#include "haris/mission.hpp"
#include "haris/runtime.hpp"
#include "haris/scenarios.hpp"
#include "support/oracles.hpp"

using namespace haris;
using doctest::Approx;

namespace {

const GeoReference kRef{{25.0, 51.0}, 0.0};

LocalizationEstimate at(double x, double y) { return {{x, y, 0.0}, 0.0}; }

Mission local_mission(std::initializer_list<Point2D> pts, const GeoReference& ref = kRef) {
  Mission m;
  m.id = "m1";
  for (const auto& p : pts) m.waypoints.push_back(to_gps(ref, p));
  return m;
}

}  // namespace

TEST_CASE("load_mission converts waypoints through the reference") {
  MissionExecutor ex({0, 0, 0});
  Mission m;
  m.id = "north";
  m.waypoints = {kRef.origin, {25.0 + 100.0 / 111194.9, 51.0}};
  const auto goals = ex.load_mission(m, kRef);
  REQUIRE(goals.size() == 2);
  CHECK(goals[0].x == 0.0);
  CHECK(goals[0].y == 0.0);
  CHECK(std::abs(goals[1].x) < 1e-6);
  CHECK(distance(goals[0], goals[1]) == Approx(oracle::haversine(m.waypoints[0], m.waypoints[1])).epsilon(1e-4));
  CHECK(ex.state().phase == Phase::Navigating);
  CHECK(ex.state().waypoint_index == 0);

  CHECK_THROWS_AS(ex.load_mission(m, kRef), MissionRejected);
  CHECK(ex.state().active_mission->id == "north");
}

TEST_CASE("load_mission validation") {
  MissionExecutor ex({0, 0, 0});
  CHECK_THROWS_AS(ex.load_mission(Mission{}, kRef), MissionRejected);
  Mission bad = local_mission({{1, 1}});
  bad.arrival_tolerance = 0.0;
  CHECK_THROWS_AS(ex.load_mission(bad, kRef), MissionRejected);

  Mission far;
  far.waypoints = {{26.0, 51.0}};
  CHECK(ex.load_mission(far, kRef).empty());
  CHECK(ex.state().phase == Phase::Aborted);
  CHECK(ex.state().abort_reason.find("out of range") != std::string::npos);

  // A terminal mission does not block the next one.
  CHECK(ex.load_mission(local_mission({{1, 1}}), kRef).size() == 1);
}

TEST_CASE("tick sequencing, docking and gates") {
  MissionExecutor ex({0, 0, 0});
  TickResult idle = ex.tick(at(0, 0), 1.0, NavStatus::Ok, 0.0);
  CHECK(idle.state.phase == Phase::Idle);
  CHECK_FALSE(idle.goal);
  CHECK_FALSE(idle.gates.alpr_active);

  ex.load_mission(local_mission({{5, 0}, {5, 5}}), kRef);
  TickResult r = ex.tick(at(1, 0), 0.5, NavStatus::Ok, 1.0);
  CHECK(r.state.phase == Phase::Navigating);
  CHECK(r.state.waypoint_index == 0);
  REQUIRE(r.goal);
  CHECK(r.goal->x == Approx(5.0));
  CHECK(r.gates.alpr_active);
  CHECK_FALSE(ex.tick(at(1, 0), 0.05, NavStatus::Ok, 1.1).gates.alpr_active);

  r = ex.tick(at(4.8, 0.1), 0.5, NavStatus::Ok, 2.0);
  CHECK(r.state.waypoint_index == 1);
  CHECK(r.goal->y == Approx(5.0));
  r = ex.tick(at(5, 4.75), 0.5, NavStatus::Ok, 3.0);
  CHECK(r.state.phase == Phase::Docking);
  CHECK_FALSE(r.gates.alpr_active);
  CHECK(*r.goal == Point2D{0, 0});
  CHECK_FALSE(r.at_dock);
  REQUIRE(ex.arrivals().size() == 2);
  CHECK(ex.arrivals()[0].waypoint_index == 0);
  CHECK(ex.arrivals()[1].waypoint_index == 1);

  r = ex.tick(at(0.1, 0.1), 0.0, NavStatus::Ok, 4.0);
  CHECK(r.at_dock);
  int published = 0;
  ex.on_reference([&](const GeoReference&) { ++published; });
  const GeoReference same = ex.on_docked(kRef, kRef.origin, kRef.heading_offset, at(0, 0));
  CHECK(same.origin.lat == Approx(kRef.origin.lat).epsilon(1e-15));
  CHECK(same.origin.lon == Approx(kRef.origin.lon).epsilon(1e-15));
  CHECK(ex.state().phase == Phase::Completed);
  CHECK(published == 1);
  CHECK_THROWS_AS(ex.on_docked(kRef, kRef.origin, 0.0, at(0, 0)), MissionRejected);
  CHECK(published == 1);
}

TEST_CASE("waypoints are never skipped") {
  MissionExecutor ex({0, 0, 0});
  ex.load_mission(local_mission({{5, 0}, {5, 5}, {0, 5}}), kRef);
  // Standing on waypoint 2 before reaching 0 must not advance.
  for (int i = 0; i < 5; ++i) CHECK(ex.tick(at(0, 5), 0.5, NavStatus::Ok, i).state.waypoint_index == 0);
  // Waypoints 0 and 1 coincide: one arrival per tick.
  MissionExecutor dup({0, 0, 0});
  dup.load_mission(local_mission({{2, 2}, {2, 2}}), kRef);
  CHECK(dup.tick(at(2, 2), 0.5, NavStatus::Ok, 0).state.waypoint_index == 1);
  CHECK(dup.tick(at(2, 2), 0.5, NavStatus::Ok, 0.05).state.phase == Phase::Docking);
}

TEST_CASE("unreachable for more than 10 s aborts") {
  MissionExecutor ex({0, 0, 0});
  ex.load_mission(local_mission({{5, 0}}), kRef);
  ex.tick(at(0, 0), 0.0, NavStatus::Blocked, 0.0);
  CHECK(ex.tick(at(0, 0), 0.0, NavStatus::NoPath, 10.0).state.phase == Phase::Navigating);
  // Recovery resets the clock.
  ex.tick(at(0, 0), 0.0, NavStatus::Ok, 10.0);
  ex.tick(at(0, 0), 0.0, NavStatus::Blocked, 11.0);
  CHECK(ex.tick(at(0, 0), 0.0, NavStatus::Blocked, 21.0).state.phase == Phase::Navigating);
  const TickResult r = ex.tick(at(0, 0), 0.0, NavStatus::Blocked, 21.05);
  CHECK(r.state.phase == Phase::Aborted);
  CHECK(r.state.abort_reason == "unreachable");
  CHECK_FALSE(r.goal);
}

TEST_CASE("on_docked needs the robot at the station") {
  MissionExecutor ex({0, 0, 0});
  ex.load_mission(local_mission({{1, 0}}), kRef);
  CHECK_THROWS_AS(ex.on_docked(kRef, kRef.origin, 0.0, at(1, 0)), MissionRejected);
  ex.tick(at(1, 0), 0.3, NavStatus::Ok, 0.0);
  REQUIRE(ex.state().phase == Phase::Docking);
  CHECK_THROWS_AS(ex.on_docked(kRef, kRef.origin, 0.0, at(1, 0)), MissionRejected);

  // Injected drift: the docked robot believes it is 0.2 m off the station.
  const LocalizationEstimate drifted{{0.2, 0.1, 0.05}, 0.0};
  const GeoReference fixed = ex.on_docked(kRef, kRef.origin, 0.0, drifted);
  const GeoPoint reported = to_gps(fixed, drifted.pose.position());
  CHECK(std::abs(reported.lat - kRef.origin.lat) <= 1e-12);
  CHECK(std::abs(reported.lon - kRef.origin.lon) <= 1e-12);
}

TEST_CASE("abort and state listener") {
  MissionExecutor ex({0, 0, 0});
  std::vector<Phase> seen;
  ex.on_state([&](const MissionState& s) { seen.push_back(s.phase); });
  ex.abort("nothing running");
  CHECK(seen.empty());
  ex.load_mission(local_mission({{3, 0}}), kRef);
  ex.abort("operator");
  CHECK(ex.state().abort_reason == "operator");
  CHECK(seen == std::vector<Phase>{Phase::Navigating, Phase::Aborted});
  CHECK(parse_phase(to_string(Phase::Docking)) == Phase::Docking);
  CHECK_THROWS_AS(parse_phase("Flying"), std::invalid_argument);
}

TEST_CASE("three-waypoint mission in simulation") {
  const WorldModel world = room_world(12.0, {2.0, 2.0, 0.0});
  ScenarioConfig cfg;
  cfg.seed = 4;
  cfg.particles = 200;
  cfg.speed = 0.7;
  Runtime rt(world, cfg);
  const std::vector<Point2D> pts{{9, 2.5}, {9, 9}, {3, 9}};
  Mission m;
  m.id = "tour";
  for (const auto& p : pts) m.waypoints.push_back(to_gps(world.true_reference(), p));
  rt.submit(m);

  std::vector<TrajectoryRow> log;
  std::vector<Phase> phases;
  std::vector<std::size_t> targets;
  while (!rt.idle() && rt.now() < 300.0) {
    log.push_back(rt.tick());
    const MissionState& s = rt.executor().state();
    if (phases.empty() || phases.back() != s.phase) phases.push_back(s.phase);
    if (s.phase == Phase::Navigating && (targets.empty() || targets.back() != s.waypoint_index))
      targets.push_back(s.waypoint_index);
  }
  CHECK(phases == std::vector<Phase>{Phase::Navigating, Phase::Docking, Phase::Completed});
  CHECK(targets == std::vector<std::size_t>{0, 1, 2});
  const auto& arrivals = rt.executor().arrivals();
  REQUIRE(arrivals.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(arrivals[i].waypoint_index == i);
    if (i > 0) CHECK(arrivals[i].time > arrivals[i - 1].time);
    // Trajectory log oracle: the true pose at the arrival tick is near the goal.
    const TrajectoryRow* row = nullptr;
    for (const auto& r : log)
      if (std::abs(r.t - arrivals[i].time) < 1e-9) row = &r;
    REQUIRE(row);
    CHECK(distance(row->truth.position(), pts[i]) <= m.arrival_tolerance + 0.1);
  }
  CHECK(rt.resync_count() == 1);
}
