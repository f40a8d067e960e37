#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "haris/distance_transform.hpp"
#include "haris/mapping.hpp"
#include "haris/particle_filter.hpp"
#include "haris/sim.hpp"
#include "haris/slam.hpp"

using namespace haris;
using doctest::Approx;

namespace {

LaserScan single_beam(double range, double range_max = 12.0) {
  LaserScan s;
  s.angle_min = 0.0;
  s.angle_max = 0.0;
  s.angle_increment = 0.1;
  s.range_max = range_max;
  s.ranges = {range};
  return s;
}

WorldModel box_world(double size) {
  WorldModel w;
  w.bounds = {0, 0, size, size};
  w.walls = {{{0, 0}, {size, 0}}, {{size, 0}, {size, size}}, {{size, size}, {0, size}}, {{0, size}, {0, 0}}};
  w.parked_cars.push_back({"P1", {size * 0.7, size * 0.3, 0.4}, 1.5, 0.8, VehicleClass::Car});
  w.charging_station = {{1, 1, 0}, {25.0, 51.0}, 0.0};
  w.noise.lidar_range_std = 0.0;
  return w;
}

}  // namespace

TEST_CASE("beam updates: free cells before the end, occupied at the end") {
  GridMap m(0.1, 10, 1, {0, 0});
  MappingParams params;
  integrate_scan(m, {0.05, 0.05, 0.0}, single_beam(0.3), params);
  CHECK(m.log_odds({0, 0}) == 0.0);
  CHECK(m.log_odds({1, 0}) == Approx(params.l_free));
  CHECK(m.log_odds({2, 0}) == Approx(params.l_free));
  CHECK(m.log_odds({3, 0}) == Approx(params.l_occ));
  for (int c = 4; c < 10; ++c) CHECK(m.log_odds({c, 0}) == 0.0);

  std::vector<int> visited;
  traverse_cells(m, {0.05, 0.05}, {0.35, 0.05}, [&](CellIndex c) { visited.push_back(c.col); });
  CHECK(visited == std::vector<int>{1, 2});
}

TEST_CASE("no-return beams carve free space to range_max") {
  GridMap m(0.1, 20, 1, {0, 0});
  integrate_scan(m, {0.05, 0.05, 0.0}, single_beam(2.0, 1.0), MappingParams{});
  for (int c = 1; c < 10; ++c) CHECK(m.log_odds({c, 0}) < 0.0);
  for (int c = 11; c < 20; ++c) CHECK(m.log_odds({c, 0}) == 0.0);
}

TEST_CASE("log-odds saturate at the clamp") {
  GridMap m(0.1, 10, 1, {0, 0});
  MappingParams params;
  for (int i = 0; i < 100; ++i) integrate_scan(m, {0.05, 0.05, 0.0}, single_beam(0.3), params);
  CHECK(m.log_odds({3, 0}) == params.clamp);
  CHECK(m.log_odds({1, 0}) == -params.clamp);
  CHECK_THROWS_AS((MappingParams{0.85, 0.4, 4.0, 0.65, 0.25}.validate()), std::invalid_argument);
}

TEST_CASE("traversal matches a dense sampling oracle") {
  const GridMap m(0.1, 40, 40, {-2, -2});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.95, 1.95);
  for (int trial = 0; trial < 200; ++trial) {
    const Point2D a{u(rng), u(rng)}, b{u(rng), u(rng)};
    std::vector<CellIndex> got;
    traverse_cells(m, a, b, [&](CellIndex c) { got.push_back(c); });
    const CellIndex ca = *world_to_grid(m, a), cb = *world_to_grid(m, b);
    // Every cell the segment strictly passes through, found by fine sampling.
    std::vector<CellIndex> want;
    const int steps = 20000;
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      const CellIndex c = *world_to_grid(m, a + t * (b - a));
      if (c == ca || c == cb) continue;
      if (want.empty() || !(want.back() == c)) want.push_back(c);
    }
    // Sampling can only miss corner grazes, never invent cells.
    for (const auto& c : want) {
      bool found = false;
      for (const auto& g : got) found = found || g == c;
      CHECK(found);
    }
    for (std::size_t i = 1; i < got.size(); ++i)
      CHECK(std::abs(got[i].col - got[i - 1].col) + std::abs(got[i].row - got[i - 1].row) <= 2);
  }
}

TEST_CASE("motion update spread follows the noise model") {
  const ParticleSet ps = ParticleSet::around({0, 0, 0}, 10000);
  MotionNoise noise;
  Rng rng(7);
  const ParticleSet moved = motion_update(ps, {1.0, 0.0, 0.0}, noise, rng);
  double mx = 0, my = 0;
  for (const auto& p : moved.particles) {
    mx += p.pose.x;
    my += p.pose.y;
  }
  mx /= 10000;
  my /= 10000;
  double vx = 0;
  for (const auto& p : moved.particles) vx += (p.pose.x - mx) * (p.pose.x - mx);
  const double sx = std::sqrt(vx / 9999);
  CHECK(mx == Approx(1.0).epsilon(0.005));
  CHECK(std::abs(my) < 0.01);
  CHECK(std::abs(sx - noise.trans_per_trans) <= 0.05 * noise.trans_per_trans);

  Rng r2(7);
  const ParticleSet still = motion_update(ps, {0, 0, 0}, noise, r2);
  for (const auto& p : still.particles) CHECK(p.pose == Pose2D{0, 0, 0});
}

TEST_CASE("systematic resampling reproduces weights") {
  ParticleSet ps;
  const double w[] = {0.7, 0.1, 0.1, 0.1};
  for (int i = 0; i < 1000; ++i) ps.particles.push_back({{static_cast<double>(i), 0, 0}, i < 4 ? w[i] : 0.0});
  const ParticleSet out = resample_systematic(ps, 17);
  REQUIRE(out.size() == 1000);
  std::map<double, int> counts;
  for (const auto& p : out.particles) {
    ++counts[p.pose.x];
    CHECK(p.weight == Approx(0.001));
  }
  CHECK(counts[0.0] == 700);
  CHECK(counts[1.0] == 100);
  CHECK(counts[2.0] == 100);
  CHECK(counts[3.0] == 100);
  CHECK(counts.size() == 4);

  // Healthy sets are left alone.
  const ParticleSet uniform = ParticleSet::around({1, 2, 3}, 50);
  const ParticleSet same = resample_systematic(uniform, 17);
  CHECK(same.size() == 50);
  CHECK(same.effective_sample_size() == Approx(50.0));
}

TEST_CASE("estimate uses a circular heading mean") {
  ParticleSet ps;
  ps.particles = {{{0, 0, M_PI - 0.1}, 0.5}, {{2, 0, -M_PI + 0.1}, 0.5}};
  const LocalizationEstimate e = estimate(ps);
  CHECK(std::abs(std::abs(e.pose.theta) - M_PI) < 1e-9);
  CHECK(e.pose.x == Approx(1.0));
  CHECK(e.position_rms == Approx(1.0));
}

TEST_CASE("measurement update against an empty map is degenerate") {
  const GridMap m(0.1, 20, 20, {0, 0});
  ParticleSet ps;
  for (int i = 0; i < 10; ++i) ps.particles.push_back({{1.0 + 0.01 * i, 1.0, 0}, i == 0 ? 0.9 : 0.1 / 9});
  const MeasurementResult r = measurement_update(ps, single_beam(0.5), m);
  CHECK(r.degenerate);
  for (const auto& p : r.particles.particles) CHECK(p.weight == Approx(0.1));
}

TEST_CASE("measurement update prefers the true pose") {
  const WorldModel w = box_world(6.0);
  const Pose2D truth{2.0, 3.0, 0.3};
  GridMap map(0.05, 130, 130, {-0.25, -0.25});
  MappingParams params;
  for (const Pose2D& p : {Pose2D{1.5, 1.5, 0}, Pose2D{4.5, 4.5, 2}, Pose2D{1.5, 4.5, -1}, Pose2D{3, 3, 0.5}})
    for (int k = 0; k < 3; ++k) integrate_scan(map, p, sim_lidar(w, p, ScanSpec{}, w.noise, 1), params);

  const LaserScan scan = sim_lidar(w, truth, ScanSpec{}, w.noise, 2);
  ParticleSet ps;
  ps.particles.push_back({truth, 1.0});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int i = 0; i < 99; ++i) ps.particles.push_back({{truth.x + g(rng), truth.y + g(rng), truth.theta + g(rng)}, 1.0});
  for (auto& p : ps.particles) p.weight = 0.01;

  const MeasurementResult r = measurement_update(ps, scan, map);
  CHECK_FALSE(r.degenerate);
  CHECK(r.particles.weight_sum() == Approx(1.0));
  double best = 0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < r.particles.size(); ++i)
    if (r.particles.particles[i].weight > best) best = r.particles.particles[i].weight, arg = i;
  CHECK(arg == 0);
}

TEST_CASE("distance transform matches brute force") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 5 + static_cast<int>(rng() % 30), h = 5 + static_cast<int>(rng() % 30);
    std::vector<std::uint8_t> site(static_cast<std::size_t>(w * h));
    for (auto& s : site) s = rng() % 17 == 0;
    const DistanceTransform dt = euclidean_distance_transform(site, w, h);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double best = DistanceTransform::kFar;
        for (int r2 = 0; r2 < h; ++r2)
          for (int c2 = 0; c2 < w; ++c2)
            if (site[r2 * w + c2]) best = std::min(best, double((r - r2) * (r - r2) + (c - c2) * (c - c2)));
        const std::size_t i = static_cast<std::size_t>(r * w + c);
        if (best >= DistanceTransform::kFar) {
          CHECK(dt.squared[i] >= DistanceTransform::kFar / 2);
          CHECK(dt.nearest[i] == -1);
        } else {
          CHECK(dt.squared[i] == best);
          const int n = dt.nearest[i];
          REQUIRE(n >= 0);
          CHECK(site[static_cast<std::size_t>(n)]);
          CHECK(double((n / w - r) * (n / w - r) + (n % w - c) * (n % w - c)) == best);
        }
      }
  }
}

TEST_CASE("slam pipeline tracks a straight drive with exact odometry") {
  const WorldModel w = box_world(8.0);
  SlamConfig cfg;
  cfg.particles = 200;
  SlamPipeline slam(GridMap(0.05, 170, 170, {-0.25, -0.25}), {1.0, 4.0, 0.0}, cfg, 5);
  Pose2D truth{1.0, 4.0, 0.0};
  CHECK(slam.on_scan(sim_lidar(w, truth, ScanSpec{}, w.noise, 0)));
  for (int i = 1; i <= 60; ++i) {
    const Pose2D next = integrate_unicycle(truth, {0.5, 0.0}, 0.1);
    slam.on_odometry(relative(truth, next));
    truth = next;
    slam.on_scan(sim_lidar(w, truth, ScanSpec{}, w.noise, static_cast<std::uint64_t>(i)));
  }
  CHECK(slam.update_count() >= 20);
  const Pose2D est = slam.estimate().pose;
  CHECK(distance(est.position(), truth.position()) < 0.05);
  CHECK(std::abs(normalize_angle(est.theta - truth.theta)) < 0.05);
}
