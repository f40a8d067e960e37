#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "haris/messages.hpp"
#include "haris/plate_store.hpp"

namespace haris {

struct HttpRequest {
  std::string method;
  std::string target;  // path plus optional query
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Latest robot-side state as seen from the bus.
struct RobotStateView {
  std::optional<PoseEstimateMsg> pose;
  std::optional<MissionStateMsg> mission;
  std::optional<GeoReference> reference;
};

struct MissionRecord {
  Mission mission;
  MissionStateMsg state;
};

/// Owns the plate store writes and the robot/mission views. Bus input is
/// consumed either by pump() or by the background owner task.
class BackendService {
 public:
  BackendService(Bus& bus, PlateStore& store);
  ~BackendService();
  BackendService(const BackendService&) = delete;
  BackendService& operator=(const BackendService&) = delete;

  /// Applies every queued bus message; returns how many were handled.
  std::size_t pump();

  /// Runs pump() on a background thread until stop().
  void start();
  void stop();

  /// Pure request router; safe to call from any thread.
  HttpResponse handle(const HttpRequest& req);

  RobotStateView robot_state() const;
  std::vector<MissionRecord> missions() const;
  PlateStore& store() { return store_; }
  Bus& bus() { return bus_; }

 private:
  void apply(const Envelope& e);
  HttpResponse post_mission(const std::string& body);
  bool mission_in_progress_locked() const;

  Bus& bus_;
  PlateStore& store_;
  Bus::SubscriptionPtr sightings_, poses_, states_, refs_;
  mutable std::mutex mu_;
  RobotStateView robot_;
  std::map<std::string, MissionRecord> missions_;
  std::vector<std::string> mission_order_;
  std::string latest_mission_;
  std::uint64_t next_mission_ = 0;
  std::atomic<bool> running_{false};
  std::thread owner_;
};

/// HTTP API plus the /api/stream WebSocket bridge on one port.
class HttpServer {
 public:
  HttpServer(BackendService& service, const std::string& address, unsigned short port);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Bound port (useful with port 0).
  unsigned short port() const;
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Decodes %XX escapes and '+'.
std::string url_decode(const std::string& s);

}  // namespace haris
