#include "haris/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "haris/json_util.hpp"
#include "haris/rng.hpp"

namespace haris {

std::string to_string(LocalizationMode m) {
  switch (m) {
    case LocalizationMode::GpsOnly: return "gps_only";
    case LocalizationMode::Fused: return "fused";
    case LocalizationMode::Odom: return "odom";
  }
  return "fused";
}

LocalizationMode parse_localization_mode(const std::string& s) {
  for (auto m : {LocalizationMode::GpsOnly, LocalizationMode::Fused, LocalizationMode::Odom})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown localization mode '" + s + "' (expected gps_only, fused or odom)");
}

void ScenarioConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  if (!(gps_rate_hz > 0.0) || !(scan_rate_hz > 0.0) || !(alpr_rate_hz > 0.0))
    throw std::invalid_argument("sensor rates must be positive");
  if (particles == 0) throw std::invalid_argument("particles must be positive");
  if (!(map_resolution > 0.0)) throw std::invalid_argument("map_resolution must be positive");
  for (const auto& s : teleop)
    if (!(s.duration >= 0.0)) throw std::invalid_argument("teleop durations must be non-negative");
  camera.validate();
}

namespace {

GridMap make_map(const WorldModel& w, const ScenarioConfig& c) {
  const double m = c.map_margin;
  const int width = static_cast<int>(std::ceil((w.bounds.width() + 2.0 * m) / c.map_resolution));
  const int height = static_cast<int>(std::ceil((w.bounds.height() + 2.0 * m) / c.map_resolution));
  return GridMap(c.map_resolution, width, height, {w.bounds.min_x - m, w.bounds.min_y - m});
}

Path densify(const std::vector<Point2D>& pts, double step) {
  Path p;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point2D d = pts[i + 1] - pts[i];
    const double len = norm(d);
    const double heading = std::atan2(d.y, d.x);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 0; k < n; ++k) {
      const Point2D q = pts[i] + (static_cast<double>(k) / n) * d;
      p.waypoints.emplace_back(q.x, q.y, heading);
    }
  }
  if (!pts.empty()) {
    const double heading = p.waypoints.empty() ? 0.0 : p.waypoints.back().theta;
    p.waypoints.emplace_back(pts.back().x, pts.back().y, heading);
  }
  return p;
}

std::int64_t to_ms(double t) { return static_cast<std::int64_t>(std::llround(t * 1000.0)); }

}  // namespace

Runtime::Runtime(WorldModel world, ScenarioConfig config, Bus* bus)
    : world_(std::move(world)),
      config_(std::move(config)),
      bus_(bus),
      true_reference_(world_.true_reference()),
      reference_(true_reference_),
      odom_rng_(make_rng(config_.seed, "sim/odometry")),
      lidar_rng_(make_rng(config_.seed, "sim/lidar")),
      gps_rng_(make_rng(config_.seed, "sim/gps")),
      compass_rng_(make_rng(config_.seed, "sim/compass")),
      alpr_rng_(make_rng(config_.seed, "alpr")),
      executor_(world_.charging_station.pose, MissionExecutor::Options{10.0, config_.return_to_station}) {
  config_.validate();
  profile_.v_max = std::max(profile_.v_max, config_.speed);
  for (const auto& s : config_.teleop) profile_.v_max = std::max(profile_.v_max, std::abs(s.twist.v));

  const Pose2D start = config_.start_pose.value_or(world_.charging_station.pose);
  sim_.true_pose = start;
  sim_.rng_seed = config_.seed;
  est_.pose = start;
  dead_reckoned_ = start;

  NavigatorConfig nc;
  nc.dwa.v_max = config_.speed;
  nc.dwa.omega_max = profile_.omega_max;
  nc.dwa.dt = config_.dt;
  nc.inflation.inscribed_radius = profile_.radius;
  navigator_ = Navigator(nc);

  GridMap map = make_map(world_, config_);
  if (config_.mode == LocalizationMode::Fused) {
    SlamConfig sc;
    sc.particles = config_.particles;
    slam_.emplace(std::move(map), start, sc, derive_seed(config_.seed, "slam"));
    const ScanSpec spec;
    slam_->on_scan(sim_lidar(world_, sim_.true_pose, spec, world_.noise, lidar_rng_));
    next_scan_ = 1.0 / config_.scan_rate_hz;
  } else {
    blind_map_ = std::move(map);
  }

  if (!config_.reference_path.empty()) {
    reference_path_ = densify(config_.reference_path, 0.05);
    follow_done_ = false;
  }

  executor_.on_reference([this](const GeoReference& r) {
    ++resyncs_;
    publish(topics::kReference, r);
  });
  executor_.on_state([this](const MissionState& s) { publish_state(s); });
}

const GridMap& Runtime::map() const { return slam_ ? slam_->map() : blind_map_; }

void Runtime::publish(const std::string& topic, Message m) {
  if (bus_) bus_->publish(topic, std::move(m));
}

void Runtime::publish_state(const MissionState& s) {
  if (!bus_) return;
  MissionStateMsg msg;
  msg.mission_id = s.active_mission ? s.active_mission->id : std::string();
  msg.phase = s.phase;
  msg.waypoint_index = s.waypoint_index;
  msg.reason = s.abort_reason;
  bus_->publish(topics::kMissionState, msg);
}

void Runtime::submit(const Mission& m) {
  executor_.load_mission(m, reference_);
  navigator_.reset();
  nav_status_ = NavStatus::Ok;
}

void Runtime::abort_mission(const std::string& reason) { executor_.abort(reason); }

void Runtime::set_reference(const GeoReference& ref) {
  reference_ = ref;
  publish(topics::kReference, ref);
}

bool Runtime::idle() const {
  return !executor_.in_progress() && follow_done_ && teleop_index_ >= config_.teleop.size();
}

void Runtime::localize(const Pose2D& prev_true) {
  const double t = sim_.clock;
  const Pose2D odom = sim_odometry(prev_true, sim_.true_pose, world_.noise, odom_rng_);
  speed_est_ = odom.x / config_.dt;

  switch (config_.mode) {
    case LocalizationMode::Fused: {
      slam_->on_odometry(odom);
      if (t + 1e-9 >= next_scan_) {
        next_scan_ += 1.0 / config_.scan_rate_hz;
        const LaserScan scan = sim_lidar(world_, sim_.true_pose, ScanSpec{}, world_.noise, lidar_rng_);
        slam_->on_scan(scan);
      }
      est_ = slam_->estimate();
      break;
    }
    case LocalizationMode::Odom:
      dead_reckoned_ = compose(dead_reckoned_, odom);
      est_.pose = dead_reckoned_;
      break;
    case LocalizationMode::GpsOnly:
      if (t + 1e-9 >= next_gps_) {
        next_gps_ += 1.0 / config_.gps_rate_hz;
        const GeoPoint fix = sim_gps(sim_.true_pose, true_reference_, world_.noise, gps_rng_);
        const Point2D p = to_local(reference_, fix);
        est_.pose = Pose2D(p.x, p.y, sim_compass(sim_.true_pose, world_.noise, compass_rng_));
      }
      break;
  }
}

Twist Runtime::control(const TickResult& tr) {
  const double dt = config_.dt;
  if (teleop_index_ < config_.teleop.size()) {
    const TeleopSegment& seg = config_.teleop[teleop_index_];
    const Twist out = seg.twist;
    teleop_elapsed_ += dt;
    if (teleop_elapsed_ >= seg.duration - 1e-9) {
      ++teleop_index_;
      teleop_elapsed_ = 0.0;
    }
    return out;
  }
  if (!follow_done_) {
    const Point2D end = reference_path_.waypoints.back().position();
    if (distance(est_.pose.position(), end) <= 0.3) {
      follow_done_ = true;
      return {};
    }
    const NavCommand c = navigator_.follow(map(), reference_path_, est_.pose, sim_.commanded, sim_.clock);
    nav_status_ = c.status;
    return c.twist;
  }
  if (tr.goal) {
    const NavCommand c = navigator_.step(map(), est_.pose, sim_.commanded, *tr.goal, sim_.clock);
    nav_status_ = c.status;
    if (bus_ && tick_count_ % 20 == 0) {
      PathMsg gp;
      gp.poses = navigator_.global_path().waypoints;
      publish(topics::kGlobalPath, std::move(gp));
    }
    if (bus_ && tick_count_ % 2 == 0) publish(topics::kLocalPath, PathMsg{"map", navigator_.local_arc()});
    return c.twist;
  }
  nav_status_ = NavStatus::Ok;
  return {};
}

TrajectoryRow Runtime::tick() {
  const Pose2D prev = sim_.true_pose;
  sim_ = step_dynamics(world_, profile_, sim_, sim_.commanded, config_.dt);
  ++tick_count_;
  localize(prev);

  TickResult tr = executor_.tick(est_, speed_est_, nav_status_, sim_.clock);
  if (tr.at_dock) {
    const ChargingStation& st = world_.charging_station;
    // The dock seats the robot mechanically; wheel odometry does not see it.
    if (distance(sim_.true_pose.position(), st.pose.position()) <= config_.dock_capture_radius) {
      sim_.true_pose = st.pose;
      sim_.commanded = {};
      sim_.contact = false;
      // The filter knows where the station sits on its own map.
      if (slam_) {
        GridMap map = slam_->map();
        const SlamConfig cfg = slam_->config();
        slam_.emplace(std::move(map), st.pose, cfg, derive_seed(config_.seed, fmt::format("slam/{}", resyncs_ + 1)));
        est_ = slam_->estimate();
      }
      reference_ = executor_.on_docked(reference_, st.geo, normalize_angle(st.heading_offset + st.pose.theta), est_);
      tr = executor_.tick(est_, 0.0, NavStatus::Ok, sim_.clock);
    }
  }

  if (tr.gates.alpr_active && sim_.clock + 1e-9 >= next_alpr_) {
    next_alpr_ = sim_.clock + 1.0 / config_.alpr_rate_hz;
    const ObserveContext ctx{sim_.true_pose, est_.pose, reference_, to_ms(sim_.clock)};
    for (auto& s : observe(world_, ctx, config_.camera, tr.gates, alpr_rng_)) {
      publish(topics::kSighting, s);
      sightings_.push_back(std::move(s));
    }
  }

  sim_.commanded = clamp_twist(control(tr), profile_);

  if (bus_ && sim_.clock + 1e-9 >= next_pose_pub_) {
    next_pose_pub_ = sim_.clock + 0.1;
    PoseEstimateMsg pm;
    pm.pose = est_.pose;
    pm.geo = to_gps(reference_, est_.pose.position());
    pm.speed = speed_est_;
    pm.sim_time = sim_.clock;
    publish(topics::kPose, pm);
  }
  if (bus_ && sim_.clock + 1e-9 >= next_map_pub_) {
    next_map_pub_ = sim_.clock + 5.0;
    publish(topics::kMap, MapSnapshot{std::make_shared<const GridMap>(map())});
  }
  return {sim_.clock, sim_.true_pose, est_.pose};
}

Mission load_mission(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ScenarioError("cannot open mission file " + p.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(p.filename().string() + ": malformed JSON: " + e.what());
  }
  try {
    Mission m = mission_from_json(j);
    if (m.id.empty()) m.id = p.stem().string();
    return m;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(p.filename().string() + ": " + e.what());
  }
}

double cross_track_distance(Point2D p, const std::vector<Point2D>& path) {
  if (path.empty()) return 0.0;
  if (path.size() == 1) return distance(p, path.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) best = std::min(best, segment_distance({path[i], path[i + 1]}, p));
  return best;
}

double rms_cross_track(const std::vector<Point2D>& points, const std::vector<Point2D>& path) {
  if (points.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : points) {
    const double d = cross_track_distance(p, path);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(points.size()));
}

namespace {

std::string fmt_pose(const Pose2D& p) { return fmt::format("{:.6f},{:.6f},{:.6f}", p.x, p.y, p.theta); }

}  // namespace

RunResult run_scenario(const WorldModel& world, const ScenarioConfig& config, const std::optional<Mission>& mission,
                       Bus* bus) {
  Runtime rt(world, config, bus);
  if (mission) rt.submit(*mission);

  std::filesystem::create_directories(config.output_dir);
  std::ofstream traj(config.output_dir / "trajectory.csv", std::ios::binary);
  traj << "t,true_x,true_y,true_theta,est_x,est_y,est_theta\n";

  const auto total = static_cast<std::size_t>(std::llround(config.duration / config.dt));
  RunResult result;
  double pos_err_sq = 0.0;
  std::vector<Point2D> true_pts, est_pts;
  for (std::size_t i = 0; i < total; ++i) {
    const TrajectoryRow row = rt.tick();
    traj << fmt::format("{:.3f},{},{}\n", row.t, fmt_pose(row.truth), fmt_pose(row.estimate));
    const double e = distance(row.truth.position(), row.estimate.position());
    pos_err_sq += e * e;
    if (!config.reference_path.empty()) {
      true_pts.push_back(row.truth.position());
      est_pts.push_back(row.estimate.position());
    }
    ++result.ticks;
    if (rt.idle() && (mission || !config.reference_path.empty() || !config.teleop.empty())) break;
  }
  if (rt.executor().in_progress()) rt.abort_mission("timeout");

  save_pgm(rt.map(), config.output_dir / "map.pgm");

  std::ofstream sight(config.output_dir / "sightings.csv", std::ios::binary);
  sight << "t,plate_read,true_plate,confidence,lat,lon,x,y\n";
  std::set<std::string> read_plates, correct_plates;
  for (const auto& s : rt.sightings()) {
    sight << fmt::format("{:.3f},{},{},{:.6f},{:.9f},{:.9f},{:.6f},{:.6f}\n", s.timestamp / 1000.0, s.plate_read,
                         s.true_plate, s.confidence, s.car_position.lat, s.car_position.lon, s.local_position.x,
                         s.local_position.y);
    read_plates.insert(s.plate_read);
    if (s.plate_read == s.true_plate) correct_plates.insert(s.true_plate);
  }

  const MissionState& st = rt.executor().state();
  result.phase = st.phase;
  result.reason = st.abort_reason;
  result.exit_code = st.phase == Phase::Aborted ? 1 : 0;

  json arrivals = json::array();
  for (const auto& a : rt.executor().arrivals())
    arrivals.push_back({{"waypoint", a.waypoint_index}, {"t", fixed_number(a.time, 3)}});
  const double final_err = distance(rt.sim().true_pose.position(), rt.estimate().pose.position());
  json metrics{{"mode", to_string(config.mode)},
               {"seed", config.seed},
               {"ticks", result.ticks},
               {"sim_time", fixed_number(rt.now(), 3)},
               {"phase", to_string(st.phase)},
               {"reason", st.abort_reason},
               {"arrivals", arrivals},
               {"resyncs", rt.resync_count()},
               {"final_position_error", fixed_number(final_err, 6)},
               {"rms_position_error", fixed_number(result.ticks ? std::sqrt(pos_err_sq / result.ticks) : 0.0, 6)},
               {"sightings", rt.sightings().size()},
               {"plates_read", read_plates.size()},
               {"plates_read_correctly", correct_plates.size()},
               {"cars", rt.world().parked_cars.size()}};
  if (!config.reference_path.empty()) {
    metrics["rms_cross_track_true"] = fixed_number(rms_cross_track(true_pts, config.reference_path), 6);
    metrics["rms_cross_track_reported"] = fixed_number(rms_cross_track(est_pts, config.reference_path), 6);
  }
  std::ofstream(config.output_dir / "metrics.json", std::ios::binary) << dump_json(metrics, 2) << "\n";
  spdlog::info("run finished: phase {} after {:.2f} s ({} ticks)", to_string(st.phase), rt.now(), result.ticks);
  return result;
}

RunResult run_scenario(const ScenarioConfig& config) {
  const WorldModel world = load_world(config.world_path);
  std::optional<Mission> mission;
  if (config.mission_path) mission = load_mission(*config.mission_path);
  return run_scenario(world, config, mission);
}

}  // namespace haris
