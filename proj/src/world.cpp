#include "haris/world.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "haris/json_util.hpp"

namespace haris {

std::string to_string(VehicleClass c) {
  switch (c) {
    case VehicleClass::Car: return "car";
    case VehicleClass::Truck: return "truck";
    case VehicleClass::Bus: return "bus";
    case VehicleClass::Motorbike: return "motorbike";
  }
  return "car";
}

VehicleClass parse_vehicle_class(const std::string& label) {
  std::string s = label;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (VehicleClass c : kVehicleClasses)
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown class label '" + label + "'");
}

std::array<Point2D, 4> ParkedCar::corners() const {
  const double hl = length / 2.0, hw = width / 2.0;
  return {transform_point(pose, {hl, hw}), transform_point(pose, {-hl, hw}),
          transform_point(pose, {-hl, -hw}), transform_point(pose, {hl, -hw})};
}

std::array<Segment, 4> ParkedCar::edges() const {
  const auto c = corners();
  return {Segment{c[0], c[1]}, Segment{c[1], c[2]}, Segment{c[2], c[3]}, Segment{c[3], c[0]}};
}

bool ParkedCar::contains(Point2D p) const {
  const Point2D local = transform_point(inverse(pose), p);
  return std::abs(local.x) <= length / 2.0 && std::abs(local.y) <= width / 2.0;
}

GeoReference WorldModel::true_reference() const {
  const ChargingStation& s = charging_station;
  return resync(GeoReference{}, s.geo, normalize_angle(s.heading_offset + s.pose.theta), s.pose);
}

std::vector<Segment> WorldModel::obstacle_segments() const {
  std::vector<Segment> out = walls;
  for (const auto& car : parked_cars)
    for (const auto& e : car.edges()) out.push_back(e);
  return out;
}

namespace {

// Separating-axis test on the two rectangles' edge normals.
bool footprints_overlap(const ParkedCar& a, const ParkedCar& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  for (const auto* rect : {&ca, &cb}) {
    for (int i = 0; i < 2; ++i) {
      const Point2D e = (*rect)[(i + 1) % 4] - (*rect)[i];
      const Point2D axis{-e.y, e.x};
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const auto& p : ca) { const double d = dot(p, axis); amin = std::min(amin, d); amax = std::max(amax, d); }
      for (const auto& p : cb) { const double d = dot(p, axis); bmin = std::min(bmin, d); bmax = std::max(bmax, d); }
      if (amax <= bmin || bmax <= amin) return false;
    }
  }
  return true;
}

template <class F>
auto with_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(field + ": " + e.what());
  }
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  return require_number(j, key);
}

}  // namespace

void validate_world(const WorldModel& w) {
  if (!(w.bounds.max_x > w.bounds.min_x) || !(w.bounds.max_y > w.bounds.min_y))
    throw ScenarioError("bounds: max must exceed min");
  for (std::size_t i = 0; i < w.parked_cars.size(); ++i) {
    const ParkedCar& car = w.parked_cars[i];
    const std::string field = "cars[" + std::to_string(i) + "]";
    if (car.plate.empty()) throw ScenarioError(field + ".plate: must be non-empty");
    if (!(car.length > 0.0) || !(car.width > 0.0)) throw ScenarioError(field + ": length and width must be positive");
    for (const auto& c : car.corners())
      if (!w.bounds.contains(c)) throw ScenarioError(field + ": footprint outside bounds");
    for (std::size_t k = 0; k < i; ++k)
      if (footprints_overlap(car, w.parked_cars[k]))
        throw ScenarioError(field + ": footprint overlaps cars[" + std::to_string(k) + "]");
  }
  if (!w.bounds.contains(w.charging_station.pose.position()))
    throw ScenarioError("station: outside bounds");
  const NoiseProfile& n = w.noise;
  for (double v : {n.odom_trans_std, n.odom_rot_std, n.odom_rot_multiplier, n.lidar_range_std, n.gps_std, n.compass_std})
    if (!(v >= 0.0)) throw ScenarioError("noise: values must be non-negative");
}

WorldModel world_from_json(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario: expected a JSON object");
  WorldModel w;
  with_field("bounds", [&] {
    const json& b = j.at("bounds");
    w.bounds = {require_number(b, "min_x"), require_number(b, "min_y"), require_number(b, "max_x"),
                require_number(b, "max_y")};
  });
  if (j.contains("walls")) {
    const json& walls = j.at("walls");
    if (!walls.is_array()) throw ScenarioError("walls: expected an array");
    for (std::size_t i = 0; i < walls.size(); ++i) {
      with_field("walls[" + std::to_string(i) + "]", [&] {
        const json& s = walls[i];
        w.walls.push_back({{require_number(s, "x1"), require_number(s, "y1")},
                           {require_number(s, "x2"), require_number(s, "y2")}});
      });
    }
  }
  if (j.contains("cars")) {
    const json& cars = j.at("cars");
    if (!cars.is_array()) throw ScenarioError("cars: expected an array");
    for (std::size_t i = 0; i < cars.size(); ++i) {
      with_field("cars[" + std::to_string(i) + "]", [&] {
        const json& c = cars[i];
        ParkedCar car;
        if (!c.contains("plate") || !c.at("plate").is_string()) throw std::invalid_argument("missing string field 'plate'");
        car.plate = c.at("plate").get<std::string>();
        car.pose = {require_number(c, "x"), require_number(c, "y"), require_number(c, "theta")};
        car.length = require_number(c, "length");
        car.width = require_number(c, "width");
        if (!c.contains("class") || !c.at("class").is_string()) throw std::invalid_argument("missing string field 'class'");
        car.vehicle_class = parse_vehicle_class(c.at("class").get<std::string>());
        w.parked_cars.push_back(std::move(car));
      });
    }
  }
  with_field("station", [&] {
    const json& s = j.at("station");
    w.charging_station.pose = {require_number(s, "x"), require_number(s, "y"), require_number(s, "theta")};
    w.charging_station.geo = geo_from_json(s);
    w.charging_station.heading_offset = normalize_angle(number_or(s, "heading_offset", 0.0));
  });
  if (j.contains("noise")) {
    with_field("noise", [&] {
      const json& n = j.at("noise");
      if (!n.is_object()) throw std::invalid_argument("expected an object");
      NoiseProfile& p = w.noise;
      p.odom_trans_std = number_or(n, "odom_trans_std", p.odom_trans_std);
      p.odom_rot_std = number_or(n, "odom_rot_std", p.odom_rot_std);
      p.odom_rot_multiplier = number_or(n, "odom_rot_multiplier", p.odom_rot_multiplier);
      p.odom_rot_bias = number_or(n, "odom_rot_bias", p.odom_rot_bias);
      p.lidar_range_std = number_or(n, "lidar_range_std", p.lidar_range_std);
      p.gps_std = number_or(n, "gps_std", p.gps_std);
      p.compass_std = number_or(n, "compass_std", p.compass_std);
    });
  }
  if (j.contains("seed")) {
    with_field("seed", [&] {
      if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
        throw std::invalid_argument("must be an integer");
      w.seed = j.at("seed").get<std::uint64_t>();
    });
  }
  validate_world(w);
  return w;
}

json world_to_json(const WorldModel& w) {
  auto num = [](double v) { return fixed_number(v, 6); };
  json j;
  j["bounds"] = {{"min_x", num(w.bounds.min_x)}, {"min_y", num(w.bounds.min_y)},
                 {"max_x", num(w.bounds.max_x)}, {"max_y", num(w.bounds.max_y)}};
  j["walls"] = json::array();
  for (const auto& s : w.walls)
    j["walls"].push_back({{"x1", num(s.a.x)}, {"y1", num(s.a.y)}, {"x2", num(s.b.x)}, {"y2", num(s.b.y)}});
  j["cars"] = json::array();
  for (const auto& c : w.parked_cars)
    j["cars"].push_back({{"plate", c.plate}, {"x", num(c.pose.x)}, {"y", num(c.pose.y)},
                         {"theta", num(c.pose.theta)}, {"length", num(c.length)},
                         {"width", num(c.width)}, {"class", to_string(c.vehicle_class)}});
  const ChargingStation& s = w.charging_station;
  j["station"] = {{"x", num(s.pose.x)}, {"y", num(s.pose.y)}, {"theta", num(s.pose.theta)},
                  {"lat", fixed_number(s.geo.lat)}, {"lon", fixed_number(s.geo.lon)},
                  {"heading_offset", num(s.heading_offset)}};
  const NoiseProfile& n = w.noise;
  j["noise"] = {{"odom_trans_std", num(n.odom_trans_std)}, {"odom_rot_std", num(n.odom_rot_std)},
                {"odom_rot_multiplier", num(n.odom_rot_multiplier)}, {"odom_rot_bias", num(n.odom_rot_bias)},
                {"lidar_range_std", num(n.lidar_range_std)}, {"gps_std", num(n.gps_std)},
                {"compass_std", num(n.compass_std)}};
  j["seed"] = w.seed;
  return j;
}

WorldModel load_world(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open world file " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ScenarioError("world file " + path.string() + ": " + e.what());
  }
  return world_from_json(j);
}

void save_world(const WorldModel& w, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw ScenarioError("cannot write world file " + path.string());
  f << dump_json(world_to_json(w), 2) << '\n';
}

}  // namespace haris
