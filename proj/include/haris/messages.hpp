#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "haris/alpr.hpp"
#include "haris/bus.hpp"
#include "haris/geo.hpp"
#include "haris/grid_map.hpp"
#include "haris/json_util.hpp"
#include "haris/laser_scan.hpp"
#include "haris/mission.hpp"

namespace haris {

namespace topics {
inline constexpr const char* kPose = "robot/pose";
inline constexpr const char* kScan = "robot/scan";
inline constexpr const char* kReference = "robot/reference";
inline constexpr const char* kInitialReference = "robot/initial_reference";
inline constexpr const char* kMap = "map/snapshot";
inline constexpr const char* kGlobalPath = "nav/global_path";
inline constexpr const char* kLocalPath = "nav/local_path";
inline constexpr const char* kMissionCommand = "mission/command";
inline constexpr const char* kMissionState = "mission/state";
inline constexpr const char* kSighting = "alpr/sighting";
}  // namespace topics

struct PoseEstimateMsg {
  Pose2D pose;
  GeoPoint geo;
  double speed = 0.0;
  double sim_time = 0.0;
  std::string frame = "map";
};

struct MapSnapshot {
  std::shared_ptr<const GridMap> map;
};

struct MissionCommand {
  enum class Action { Start, Abort };
  Action action = Action::Start;
  Mission mission;
};

struct MissionStateMsg {
  std::string mission_id;
  Phase phase = Phase::Idle;
  std::size_t waypoint_index = 0;
  std::string reason;
};

struct PathMsg {
  std::string frame = "map";
  std::vector<Pose2D> poses;
};

using Message = std::variant<json, PoseEstimateMsg, LaserScan, MapSnapshot, MissionCommand, MissionStateMsg, Sighting,
                             GeoReference, PathMsg>;
using Bus = BasicBus<Message>;
using Envelope = Bus::Envelope;

json to_json(const PoseEstimateMsg& m);
json to_json(const LaserScan& m);
json to_json(const MapSnapshot& m);
json to_json(const MissionCommand& m);
json to_json(const MissionStateMsg& m);
json to_json(const Sighting& m);
json to_json(const GeoReference& m);
json to_json(const PathMsg& m);
json mission_to_json(const Mission& m);

/// Throws std::invalid_argument naming the offending field.
Mission mission_from_json(const json& j);
MissionCommand mission_command_from_json(const json& j);
GeoReference reference_from_json(const json& j);
Sighting sighting_from_json(const json& j);

json message_to_json(const Message& m);

/// Decodes an externally supplied payload; topics with a typed schema are
/// parsed into that type, anything else stays raw JSON.
Message message_from_json(const std::string& topic, const json& payload);

/// Wire frame {topic, seq, timestamp, payload}, one per WebSocket message.
std::string envelope_to_wire(const Envelope& e);

}  // namespace haris
