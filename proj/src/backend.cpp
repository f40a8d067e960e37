#include "haris/backend.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

namespace haris {

std::string url_decode(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16)));
      i += 2;
    } else if (s[i] == '+') {
      out.push_back(' ');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

BackendService::BackendService(Bus& bus, PlateStore& store)
    : bus_(bus),
      store_(store),
      sightings_(bus.subscribe(topics::kSighting, 1 << 16)),
      poses_(bus.subscribe(topics::kPose, 64)),
      states_(bus.subscribe(topics::kMissionState, 1024)),
      refs_(bus.subscribe(topics::kReference, 64)) {}

BackendService::~BackendService() {
  stop();
  for (auto* s : {&sightings_, &poses_, &states_, &refs_}) bus_.unsubscribe(*s);
}

void BackendService::apply(const Envelope& e) {
  if (const auto* s = std::get_if<Sighting>(&e.payload)) {
    try {
      store_.upsert_sighting(*s);
    } catch (const std::invalid_argument& err) {
      spdlog::warn("rejected sighting: {}", err.what());
    }
    return;
  }
  std::lock_guard lock(mu_);
  if (const auto* p = std::get_if<PoseEstimateMsg>(&e.payload)) {
    robot_.pose = *p;
  } else if (const auto* m = std::get_if<MissionStateMsg>(&e.payload)) {
    robot_.mission = *m;
    const auto it = missions_.find(m->mission_id);
    if (it != missions_.end()) it->second.state = *m;
  } else if (const auto* r = std::get_if<GeoReference>(&e.payload)) {
    robot_.reference = *r;
  }
}

std::size_t BackendService::pump() {
  std::size_t n = 0;
  // Mission states before sightings so a 202 -> 400 window closes promptly.
  for (auto* sub : {&states_, &poses_, &refs_, &sightings_}) {
    while (auto e = (*sub)->try_pop()) {
      apply(*e);
      ++n;
    }
  }
  return n;
}

void BackendService::start() {
  if (running_.exchange(true)) return;
  owner_ = std::thread([this] {
    while (running_) {
      if (pump() == 0) {
        // Block briefly on the busiest input.
        if (auto e = sightings_->pop_for(std::chrono::milliseconds(10))) apply(*e);
      }
    }
    pump();
  });
}

void BackendService::stop() {
  if (!running_.exchange(false)) return;
  if (owner_.joinable()) owner_.join();
}

RobotStateView BackendService::robot_state() const {
  std::lock_guard lock(mu_);
  return robot_;
}

std::vector<MissionRecord> BackendService::missions() const {
  std::lock_guard lock(mu_);
  std::vector<MissionRecord> out;
  for (const auto& id : mission_order_) out.push_back(missions_.at(id));
  return out;
}

bool BackendService::mission_in_progress_locked() const {
  if (latest_mission_.empty()) return false;
  const Phase p = missions_.at(latest_mission_).state.phase;
  return p != Phase::Completed && p != Phase::Aborted;
}

namespace {

HttpResponse json_response(int status, const json& body) { return {status, dump_json(body), "application/json"}; }

HttpResponse error(int status, const std::string& message) { return json_response(status, json{{"error", message}}); }

json mission_record_json(const MissionRecord& r) {
  json j = mission_to_json(r.mission);
  j["state"] = to_json(r.state);
  return j;
}

json robot_state_json(const RobotStateView& v) {
  json j = json::object();
  j["pose"] = v.pose ? to_json(*v.pose) : json(nullptr);
  j["phase"] = v.mission ? to_string(v.mission->phase) : std::string("Idle");
  j["mission"] = v.mission ? to_json(*v.mission) : json(nullptr);
  j["reference"] = v.reference ? to_json(*v.reference) : json(nullptr);
  return j;
}

}  // namespace

HttpResponse BackendService::post_mission(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    return error(400, std::string("malformed JSON: ") + e.what());
  }
  Mission m;
  try {
    m = mission_from_json(j);
  } catch (const std::exception& e) {
    return error(400, e.what());
  }
  std::string id;
  {
    std::lock_guard lock(mu_);
    if (mission_in_progress_locked()) return error(400, "mission in progress");
    id = "mission-" + std::to_string(++next_mission_);
    m.id = id;
    m.created_at = Bus::wall_clock_ms();
    missions_[id] = MissionRecord{m, MissionStateMsg{id, Phase::Idle, 0, {}}};
    mission_order_.push_back(id);
    latest_mission_ = id;
  }
  bus_.publish(topics::kMissionCommand, MissionCommand{MissionCommand::Action::Start, m});
  return json_response(202, json{{"id", id}});
}

HttpResponse BackendService::handle(const HttpRequest& req) {
  std::string path = req.target.substr(0, req.target.find('?'));
  while (path.size() > 1 && path.back() == '/') path.pop_back();

  const std::string cars = "/api/cars";
  const std::string missions = "/api/missions";

  if (path == cars) {
    if (req.method != "GET") return error(400, "method not allowed");
    json arr = json::array();
    for (const auto& r : store_.all()) arr.push_back(record_to_json(r));
    return json_response(200, arr);
  }
  if (path.rfind(cars + "/", 0) == 0) {
    if (req.method != "GET") return error(400, "method not allowed");
    const std::string plate = url_decode(path.substr(cars.size() + 1));
    if (canonical_plate(plate).empty()) return error(400, "empty plate");
    const auto rec = store_.lookup(plate);
    if (!rec) return error(404, "plate not found");
    return json_response(200, record_to_json(*rec));
  }
  if (path == "/api/robot/state") {
    if (req.method != "GET") return error(400, "method not allowed");
    return json_response(200, robot_state_json(robot_state()));
  }
  if (path == missions) {
    if (req.method == "POST") return post_mission(req.body);
    if (req.method != "GET") return error(400, "method not allowed");
    json arr = json::array();
    for (const auto& r : this->missions()) arr.push_back(mission_record_json(r));
    return json_response(200, arr);
  }
  if (path.rfind(missions + "/", 0) == 0) {
    if (req.method != "GET") return error(400, "method not allowed");
    const std::string id = url_decode(path.substr(missions.size() + 1));
    std::lock_guard lock(mu_);
    const auto it = missions_.find(id);
    if (it == missions_.end()) return error(404, "mission not found");
    return json_response(200, mission_record_json(it->second));
  }
  return error(404, "no such endpoint");
}

}  // namespace haris
