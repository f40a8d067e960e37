#include "haris/messages.hpp"

#include <stdexcept>

namespace haris {

json to_json(const PoseEstimateMsg& m) {
  return json{{"frame", m.frame},
              {"pose", pose_to_json(m.pose)},
              {"geo", geo_to_json(m.geo)},
              {"speed", fixed_number(m.speed, 4)},
              {"sim_time", fixed_number(m.sim_time, 3)}};
}

json to_json(const LaserScan& m) {
  json ranges = json::array();
  for (double r : m.ranges) ranges.push_back(fixed_number(r, 4));
  return json{{"angle_min", m.angle_min},
              {"angle_max", m.angle_max},
              {"angle_increment", m.angle_increment},
              {"range_max", m.range_max},
              {"ranges", std::move(ranges)}};
}

json to_json(const MapSnapshot& m) {
  if (!m.map) return json(nullptr);
  const GridMap& g = *m.map;
  // ROS-style occupancy: -1 unknown, else 0..100.
  json data = json::array();
  for (double l : g.cells()) data.push_back(l == 0.0 ? -1 : static_cast<int>(std::lround(probability_from_log_odds(l) * 100.0)));
  return json{{"resolution", g.resolution()},
              {"width", g.width()},
              {"height", g.height()},
              {"origin", {{"x", g.origin().x}, {"y", g.origin().y}}},
              {"data", std::move(data)}};
}

json mission_to_json(const Mission& m) {
  json wps = json::array();
  for (const auto& g : m.waypoints) wps.push_back(geo_to_json(g));
  return json{{"id", m.id}, {"waypoints", std::move(wps)}, {"tolerance", m.arrival_tolerance}, {"created_at", m.created_at}};
}

json to_json(const MissionCommand& m) {
  return json{{"action", m.action == MissionCommand::Action::Start ? "start" : "abort"},
              {"mission", mission_to_json(m.mission)}};
}

json to_json(const MissionStateMsg& m) {
  json j{{"mission_id", m.mission_id}, {"phase", to_string(m.phase)}};
  if (m.phase == Phase::Navigating) j["waypoint_index"] = m.waypoint_index;
  if (m.phase == Phase::Aborted) j["reason"] = m.reason;
  return j;
}

json to_json(const Sighting& m) {
  return json{{"plate", m.plate_read},
              {"confidence", fixed_number(m.confidence, 6)},
              {"robot_pose", pose_to_json(m.robot_pose)},
              {"local_position", {{"x", fixed_number(m.local_position.x, 6)}, {"y", fixed_number(m.local_position.y, 6)}}},
              {"position", geo_to_json(m.car_position)},
              {"timestamp", m.timestamp}};
}

json to_json(const GeoReference& m) {
  return json{{"origin", geo_to_json(m.origin)},
              {"heading_offset", fixed_number(m.heading_offset, 12)},
              {"earth_radius", m.earth_radius}};
}

json to_json(const PathMsg& m) {
  json poses = json::array();
  for (const auto& p : m.poses) poses.push_back({fixed_number(p.x, 3), fixed_number(p.y, 3)});
  return json{{"frame", m.frame}, {"poses", std::move(poses)}};
}

Mission mission_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("mission must be an object");
  Mission m;
  if (j.contains("id")) {
    if (!j["id"].is_string()) throw std::invalid_argument("field 'id' must be a string");
    m.id = j["id"].get<std::string>();
  }
  if (!j.contains("waypoints") || !j["waypoints"].is_array()) throw std::invalid_argument("missing field 'waypoints'");
  const json& wps = j["waypoints"];
  if (wps.empty()) throw std::invalid_argument("field 'waypoints' must not be empty");
  for (std::size_t i = 0; i < wps.size(); ++i) {
    try {
      m.waypoints.push_back(geo_from_json(wps[i]));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("waypoints[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (j.contains("tolerance")) {
    m.arrival_tolerance = require_number(j, "tolerance");
    if (!(m.arrival_tolerance > 0.0)) throw std::invalid_argument("field 'tolerance' must be positive");
  }
  if (j.contains("created_at")) m.created_at = static_cast<std::int64_t>(require_number(j, "created_at"));
  return m;
}

MissionCommand mission_command_from_json(const json& j) {
  MissionCommand c;
  const std::string action = j.value("action", "start");
  if (action == "abort") {
    c.action = MissionCommand::Action::Abort;
    return c;
  }
  if (action != "start") throw std::invalid_argument("field 'action' must be 'start' or 'abort'");
  c.mission = mission_from_json(j.contains("mission") ? j["mission"] : j);
  return c;
}

GeoReference reference_from_json(const json& j) {
  GeoReference r;
  if (j.contains("origin")) {
    r.origin = geo_from_json(j["origin"]);
  } else {
    r.origin = geo_from_json(j);
  }
  if (j.contains("heading_offset")) r.heading_offset = normalize_angle(require_number(j, "heading_offset"));
  else if (j.contains("heading")) r.heading_offset = heading_offset_from_bearing(require_number(j, "heading"));
  return r;
}

Sighting sighting_from_json(const json& j) {
  Sighting s;
  if (!j.contains("plate") || !j["plate"].is_string()) throw std::invalid_argument("missing field 'plate'");
  s.plate_read = j["plate"].get<std::string>();
  s.confidence = require_number(j, "confidence");
  if (!j.contains("position")) throw std::invalid_argument("missing field 'position'");
  s.car_position = geo_from_json(j["position"]);
  if (j.contains("local_position"))
    s.local_position = {require_number(j["local_position"], "x"), require_number(j["local_position"], "y")};
  if (j.contains("robot_pose")) s.robot_pose = pose_from_json(j["robot_pose"]);
  s.timestamp = static_cast<std::int64_t>(require_number(j, "timestamp"));
  return s;
}

json message_to_json(const Message& m) {
  return std::visit(
      [](const auto& v) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, json>) return v;
        else return to_json(v);
      },
      m);
}

Message message_from_json(const std::string& topic, const json& payload) {
  if (topic == topics::kMissionCommand) return mission_command_from_json(payload);
  if (topic == topics::kInitialReference || topic == topics::kReference) return reference_from_json(payload);
  if (topic == topics::kSighting) return sighting_from_json(payload);
  return payload;
}

std::string envelope_to_wire(const Envelope& e) {
  return dump_json(json{{"topic", e.topic}, {"seq", e.seq}, {"timestamp", e.timestamp}, {"payload", message_to_json(e.payload)}});
}

}  // namespace haris
