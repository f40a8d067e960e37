#include "haris/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "haris/rng.hpp"

namespace haris {

std::pair<double, double> vehicle_dimensions(VehicleClass c) {
  switch (c) {
    case VehicleClass::Car: return {4.5, 1.8};
    case VehicleClass::Truck: return {5.5, 2.2};
    case VehicleClass::Bus: return {7.0, 2.5};
    case VehicleClass::Motorbike: return {2.0, 0.8};
  }
  return {4.5, 1.8};
}

namespace {

// y of the vehicle front edge for row r; even rows face south, odd rows north.
double row_front(int r, const LotLayout& l) {
  const int pair = r / 2;
  const double base = pair * (2.0 * l.bay_depth + l.aisle);
  return r % 2 == 0 ? base : base + 2.0 * l.bay_depth;
}

double lane_y(int r, const LotLayout& l) {
  return r % 2 == 0 ? row_front(r, l) - l.lane_offset : row_front(r, l) + l.lane_offset;
}

void add_box(WorldModel& w, Point2D c, double half) {
  const Point2D a{c.x - half, c.y - half}, b{c.x + half, c.y - half}, d{c.x + half, c.y + half}, e{c.x - half, c.y + half};
  w.walls.push_back({a, b});
  w.walls.push_back({b, d});
  w.walls.push_back({d, e});
  w.walls.push_back({e, a});
}

void add_perimeter(WorldModel& w) {
  const Bounds& b = w.bounds;
  const Point2D p0{b.min_x, b.min_y}, p1{b.max_x, b.min_y}, p2{b.max_x, b.max_y}, p3{b.min_x, b.max_y};
  w.walls.push_back({p0, p1});
  w.walls.push_back({p1, p2});
  w.walls.push_back({p2, p3});
  w.walls.push_back({p3, p0});
}

constexpr GeoPoint kDefaultAnchor{25.3755, 51.4899};

}  // namespace

WorldModel genworld(int rows, int cols, double spacing, std::uint64_t seed, const LotLayout& layout) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("genworld: rows and cols must be >= 1");
  double widest = 0.0;
  for (VehicleClass c : kVehicleClasses) widest = std::max(widest, vehicle_dimensions(c).second);
  if (!(spacing >= widest + 0.1)) throw std::invalid_argument(fmt::format("genworld: spacing must be >= {:.1f} m", widest + 0.1));

  Rng rng = make_rng(seed, "genworld");
  std::discrete_distribution<int> cls(layout.class_weights.begin(), layout.class_weights.end());
  std::uniform_int_distribution<int> digits(5, 6);
  std::set<std::string> used;

  WorldModel w;
  w.seed = seed;
  for (int r = 0; r < rows; ++r) {
    const double front = row_front(r, layout);
    for (int c = 0; c < cols; ++c) {
      ParkedCar car;
      car.vehicle_class = kVehicleClasses[static_cast<std::size_t>(cls(rng))];
      std::tie(car.length, car.width) = vehicle_dimensions(car.vehicle_class);
      const double x = (c + 0.5) * spacing;
      const double y = r % 2 == 0 ? front + car.length / 2.0 : front - car.length / 2.0;
      car.pose = Pose2D(x, y, M_PI / 2.0);
      do {
        const int n = digits(rng);
        std::uniform_int_distribution<long> pick(static_cast<long>(std::pow(10, n - 1)), static_cast<long>(std::pow(10, n)) - 1);
        car.plate = std::to_string(pick(rng));
      } while (!used.insert(car.plate).second);
      w.parked_cars.push_back(std::move(car));
    }
  }

  w.bounds.min_x = -layout.end_margin;
  w.bounds.max_x = cols * spacing + layout.end_margin;
  w.bounds.min_y = row_front(0, layout) - layout.aisle;
  const int last = rows - 1;
  w.bounds.max_y = (last % 2 == 0 ? row_front(last, layout) + layout.bay_depth : row_front(last, layout)) + layout.aisle;
  add_perimeter(w);

  w.charging_station.pose = Pose2D(-layout.end_margin / 2.0, lane_y(0, layout), 0.0);
  w.charging_station.geo = kDefaultAnchor;
  w.charging_station.heading_offset = 0.0;
  validate_world(w);
  return w;
}

std::vector<Point2D> boustrophedon_waypoints(const WorldModel& lot, int rows, int cols, double spacing,
                                             const LotLayout& layout) {
  (void)lot;
  const double x_west = -1.5, x_east = cols * spacing + 1.5;
  std::vector<Point2D> out;
  for (int r = 0; r < rows; ++r) {
    const double y = lane_y(r, layout);
    if (r % 2 == 0) {
      out.push_back({x_west, y});
      out.push_back({x_east, y});
    } else {
      out.push_back({x_east, y});
      out.push_back({x_west, y});
    }
  }
  return out;
}

Mission boustrophedon_mission(const WorldModel& lot, int rows, int cols, double spacing, const LotLayout& layout) {
  Mission m;
  m.id = fmt::format("sweep-{}x{}", rows, cols);
  const GeoReference ref = lot.true_reference();
  for (const auto& p : boustrophedon_waypoints(lot, rows, cols, spacing, layout)) m.waypoints.push_back(to_gps(ref, p));
  return m;
}

WorldModel corridor_world(std::uint64_t seed) {
  WorldModel w;
  w.seed = seed;
  w.bounds = {-4.0, -6.0, 24.0, 6.0};
  add_perimeter(w);
  for (int i = 0; i <= 5; ++i) {
    const double x = 4.0 * i - 1.0;
    add_box(w, {x, 3.0}, 0.2);
    add_box(w, {x + 2.0, -3.0}, 0.2);
  }
  w.charging_station.pose = Pose2D(0.0, 0.0, 0.0);
  w.charging_station.geo = kDefaultAnchor;
  validate_world(w);
  return w;
}

WorldModel room_world(double size, Pose2D start) {
  WorldModel w;
  w.bounds = {0.0, 0.0, size, size};
  add_perimeter(w);
  w.charging_station.pose = start;
  w.charging_station.geo = kDefaultAnchor;
  validate_world(w);
  return w;
}

std::vector<ExperimentRun> experiment_path_error(const ExperimentConfig& cfg) {
  if (cfg.speeds.empty() || cfg.seeds.empty()) throw std::invalid_argument("experiment needs >= 1 speed and >= 1 seed");
  if (cfg.path.size() < 2) throw std::invalid_argument("experiment path needs two points");
  double length = 0.0;
  for (std::size_t i = 0; i + 1 < cfg.path.size(); ++i) length += distance(cfg.path[i], cfg.path[i + 1]);

  std::vector<ExperimentRun> out;
  for (LocalizationMode mode : cfg.modes) {
    for (double speed : cfg.speeds) {
      for (std::uint64_t seed : cfg.seeds) {
        ScenarioConfig sc;
        sc.mode = mode;
        sc.speed = speed;
        sc.seed = seed;
        sc.dt = cfg.dt;
        sc.particles = cfg.particles;
        sc.reference_path = cfg.path;
        sc.start_pose = Pose2D(cfg.path[0].x, cfg.path[0].y,
                               std::atan2(cfg.path[1].y - cfg.path[0].y, cfg.path[1].x - cfg.path[0].x));
        Runtime rt(cfg.world, sc);
        const double limit = 3.0 * length / speed + 30.0;
        std::vector<Point2D> truth, reported;
        bool reached = false;
        while (rt.now() < limit) {
          const TrajectoryRow row = rt.tick();
          truth.push_back(row.truth.position());
          reported.push_back(row.estimate.position());
          // Progress of the real robot along the final segment.
          const Point2D a = cfg.path[cfg.path.size() - 2], b = cfg.path.back();
          const Point2D ab = b - a;
          if (dot(row.truth.position() - a, ab) >= dot(ab, ab)) {
            reached = true;
            break;
          }
          if (rt.follow_done()) {
            reached = true;
            break;
          }
        }
        out.push_back({mode, speed, seed, rms_cross_track(truth, cfg.path), rms_cross_track(reported, cfg.path), rt.now(),
                       reached});
      }
    }
  }
  return out;
}

std::vector<ExperimentSummary> summarize(const std::vector<ExperimentRun>& runs) {
  std::vector<ExperimentSummary> out;
  for (const auto& r : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ExperimentSummary& s) { return s.mode == r.mode && s.speed == r.speed; });
    if (it == out.end()) {
      out.push_back({r.mode, r.speed, 0, 0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0});
      it = out.end() - 1;
    }
    ++it->runs;
    it->rms_true_mean += r.rms_true;
    it->rms_true_max = std::max(it->rms_true_max, r.rms_true);
    it->rms_true_min = std::min(it->rms_true_min, r.rms_true);
    it->rms_reported_mean += r.rms_reported;
  }
  for (auto& s : out) {
    s.rms_true_mean /= static_cast<double>(s.runs);
    s.rms_reported_mean /= static_cast<double>(s.runs);
  }
  return out;
}

std::string experiment_runs_csv(const std::vector<ExperimentRun>& runs) {
  std::string out = "mode,speed,seed,rms_true,rms_reported,sim_time,reached_end\n";
  for (const auto& r : runs)
    out += fmt::format("{},{:.2f},{},{:.6f},{:.6f},{:.2f},{}\n", to_string(r.mode), r.speed, r.seed, r.rms_true,
                       r.rms_reported, r.sim_time, r.reached_end ? 1 : 0);
  return out;
}

std::string experiment_summary_csv(const std::vector<ExperimentSummary>& rows) {
  std::string out = "mode,speed,runs,rms_true_mean,rms_true_min,rms_true_max,rms_reported_mean\n";
  for (const auto& s : rows)
    out += fmt::format("{},{:.2f},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", to_string(s.mode), s.speed, s.runs, s.rms_true_mean,
                       s.rms_true_min, s.rms_true_max, s.rms_reported_mean);
  return out;
}

}  // namespace haris
