#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "doctest.h"
#include "httplib.h"
#include "haris/backend.hpp"

using namespace haris;
using namespace std::chrono_literals;
using doctest::Approx;

namespace {

Sighting sighting(const std::string& plate, std::int64_t t, double lat = 25.0, double conf = 0.9) {
  Sighting s;
  s.plate_read = plate;
  s.true_plate = plate;
  s.confidence = conf;
  s.car_position = {lat, 51.0};
  s.local_position = {lat - 25.0, 1.0};
  s.timestamp = t;
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("haris_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Minimal WebSocket client for the stream endpoint.
class WsClient {
 public:
  explicit WsClient(unsigned short port) : ws_(ioc_) {
    boost::asio::ip::tcp::resolver resolver(ioc_);
    boost::asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/api/stream");
  }
  ~WsClient() {
    boost::beast::error_code ec;
    ws_.close(boost::beast::websocket::close_code::normal, ec);
  }
  void send(const json& j) { ws_.write(boost::asio::buffer(j.dump())); }
  json read() {
    boost::beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(boost::beast::buffers_to_string(buf.data()));
  }

 private:
  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
};

}  // namespace

TEST_CASE("plate canonicalization") {
  CHECK(canonical_plate(" 12345 ") == "12345");
  CHECK(canonical_plate("ab 1\t2") == "AB12");
  CHECK(canonical_plate("   ").empty());
}

TEST_CASE("upsert keeps the newest location and counts every sighting") {
  PlateStore store;
  store.upsert_sighting(sighting("12345", 100, 25.1));
  store.upsert_sighting(sighting(" 12345", 300, 25.3));
  const auto rec = store.upsert_sighting(sighting("12345 ", 200, 25.2));
  CHECK(rec.sighting_count == 3);
  CHECK(rec.last_seen == 300);
  CHECK(rec.position.lat == 25.3);
  CHECK(store.size() == 1);
  CHECK(store.lookup("1 2 3 4 5")->position.lat == 25.3);
  CHECK_FALSE(store.lookup("99999"));

  CHECK_THROWS_AS(store.upsert_sighting(sighting("  ", 1)), std::invalid_argument);
  CHECK_THROWS_AS(store.upsert_sighting(sighting("1", 1, 25.0, 1.5)), std::invalid_argument);
}

TEST_CASE("final store state is independent of arrival order") {
  std::mt19937_64 rng(8);
  std::vector<Sighting> all;
  for (int i = 0; i < 200; ++i)
    all.push_back(sighting(std::to_string(10000 + rng() % 15), static_cast<std::int64_t>(rng() % 50),
                           25.0 + static_cast<double>(rng() % 1000) * 1e-6, static_cast<double>(rng() % 100) / 100.0));
  PlateStore reference;
  for (const auto& s : all) reference.upsert_sighting(s);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(all.begin(), all.end(), rng);
    PlateStore other;
    for (const auto& s : all) other.upsert_sighting(s);
    CHECK(other.all() == reference.all());
  }
}

TEST_CASE("journal lines round trip exactly") {
  Sighting s = sighting("12345", 1700000000123, 25.123456789012345, 0.3333333333333333);
  s.robot_pose = {1.0 / 3.0, -2.5, 0.1};
  const Sighting back = parse_journal_line(journal_line(s));
  CHECK(back.plate_read == s.plate_read);
  CHECK(back.car_position.lat == s.car_position.lat);
  CHECK(back.confidence == s.confidence);
  CHECK(back.timestamp == s.timestamp);
  CHECK_THROWS(parse_journal_line("{\"plate\":"));
  CHECK_THROWS(parse_journal_line("not json"));
}

TEST_CASE("journal replay restores the store") {
  const auto dir = temp_dir("journal");
  const auto path = dir / "plates.jsonl";
  std::vector<PlateLocationRecord> before;
  {
    PlateStore store(path);
    for (int i = 0; i < 100; ++i) store.upsert_sighting(sighting(std::to_string(20000 + i), i, 25.0 + i * 1e-5));
    store.flush();
    before = store.all();
  }
  std::size_t skipped = 99;
  auto restored = PlateStore::restore(path, &skipped);
  CHECK(skipped == 0);
  CHECK(restored->all() == before);

  // Restored stores keep appending.
  restored->upsert_sighting(sighting("77777", 5));
  restored->flush();
  restored.reset();
  CHECK(PlateStore::restore(path)->size() == 101);

  // A torn final line loses only that sighting.
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 10);
  auto torn = PlateStore::restore(path, &skipped);
  CHECK(skipped == 1);
  CHECK(torn->size() == 100);
  CHECK_FALSE(torn->lookup("77777"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent readers and writers") {
  PlateStore store;
  std::atomic<bool> stop{false};
  std::atomic<int> reads{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r)
    readers.emplace_back([&] {
      while (!stop) {
        if (auto rec = store.lookup("30000")) CHECK(rec->sighting_count >= 1);
        ++reads;
      }
    });
  for (int i = 0; i < 2000; ++i) store.upsert_sighting(sighting(std::to_string(30000 + i % 20), i));
  while (reads == 0) std::this_thread::yield();
  stop = true;
  for (auto& t : readers) t.join();
  CHECK(store.size() == 20);
  CHECK(store.lookup("30000")->sighting_count == 100);
  CHECK(reads > 0);
}

TEST_CASE("router status codes") {
  Bus bus;
  PlateStore store;
  BackendService svc(bus, store);
  bus.publish(topics::kSighting, sighting("12345", 10));
  bus.publish(topics::kPose, PoseEstimateMsg{{1, 2, 0.5}, {25.0, 51.0}, 0.4, 3.0, "map"});
  CHECK(svc.pump() == 2);

  auto get = [&](const std::string& target) { return svc.handle({"GET", target, ""}); };
  HttpResponse r = get("/api/cars/12345");
  CHECK(r.status == 200);
  CHECK(json::parse(r.body)["plate"] == "12345");
  CHECK(get("/api/cars/%2012345%20").status == 200);
  CHECK(get("/api/cars/54321").status == 404);
  CHECK(get("/api/cars/%20").status == 400);
  CHECK(json::parse(get("/api/cars").body).size() == 1);
  CHECK(get("/api/nothing").status == 404);
  CHECK(svc.handle({"DELETE", "/api/cars/12345", ""}).status == 400);

  r = get("/api/robot/state");
  CHECK(r.status == 200);
  const json state = json::parse(r.body);
  CHECK(state["phase"] == "Idle");
  CHECK(state.at("pose").at("pose").at("x").get<double>() == Approx(1.0));

  auto commands = bus.subscribe(topics::kMissionCommand);
  CHECK(svc.handle({"POST", "/api/missions", "{not json"}).status == 400);
  CHECK(svc.handle({"POST", "/api/missions", R"({"waypoints": []})"}).status == 400);
  const std::string body = R"({"waypoints": [{"lat": 25.0001, "lon": 51.0001}]})";
  r = svc.handle({"POST", "/api/missions", body});
  CHECK(r.status == 202);
  const std::string id = json::parse(r.body)["id"];
  const auto cmd = commands->try_pop();
  REQUIRE(cmd);
  CHECK(std::get<MissionCommand>(cmd->payload).mission.id == id);
  CHECK(svc.handle({"POST", "/api/missions", body}).status == 400);

  bus.publish(topics::kMissionState, MissionStateMsg{id, Phase::Completed, 0, ""});
  svc.pump();
  CHECK(json::parse(get("/api/missions/" + id).body)["state"]["phase"] == "Completed");
  CHECK(get("/api/missions/nope").status == 404);
  CHECK(json::parse(get("/api/missions").body).size() == 1);
  CHECK(svc.handle({"POST", "/api/missions", body}).status == 202);
}

TEST_CASE("url decoding") {
  CHECK(url_decode("a%20b+c") == "a b c");
  CHECK(url_decode("%41%42") == "AB");
  CHECK(url_decode("100%") == "100%");
}

TEST_CASE("HTTP server and stream") {
  Bus bus;
  PlateStore store;
  BackendService svc(bus, store);
  svc.start();
  HttpServer server(svc, "127.0.0.1", 0);
  server.start();
  REQUIRE(server.port() != 0);

  bus.publish(topics::kSighting, sighting("ABC123", 50, 25.25));
  httplib::Client http("127.0.0.1", server.port());
  httplib::Result res;
  for (int i = 0; i < 100; ++i) {
    res = http.Get("/api/cars/abc%20123");
    if (res && res->status == 200) break;
    std::this_thread::sleep_for(10ms);
  }
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["position"]["lat"].get<double>() == Approx(25.25));
  CHECK(http.Get("/api/robot/state")->status == 200);
  auto post = http.Post("/api/missions", R"({"waypoints": [{"lat": 25.0, "lon": 51.0}]})", "application/json");
  REQUIRE(post);
  CHECK(post->status == 202);

  {
    WsClient ws(server.port());
    ws.send({{"subscribe", "mission/+"}});
    CHECK(ws.read()["ack"] == "subscribe");
    bus.publish(topics::kMissionState, MissionStateMsg{"mission-1", Phase::Navigating, 0, ""});
    const json frame = ws.read();
    CHECK(frame["topic"] == "mission/state");
    CHECK(frame["payload"]["phase"] == "Navigating");

    auto refs = bus.subscribe(topics::kInitialReference);
    ws.send({{"publish", {{"topic", topics::kInitialReference},
                          {"payload", {{"lat", 25.5}, {"lon", 51.5}, {"heading_offset", 0.25}}}}}});
    CHECK(ws.read()["ack"] == "publish");
    const auto env = refs->pop_for(1000ms);
    REQUIRE(env);
    CHECK(std::get<GeoReference>(env->payload).origin.lat == Approx(25.5));

    ws.send({{"hello", 1}});
    CHECK(ws.read().contains("error"));
  }
  server.stop();
  svc.stop();
}
