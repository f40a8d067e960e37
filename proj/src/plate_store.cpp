#include "haris/plate_store.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <iterator>
#include <tuple>

#include <spdlog/spdlog.h>

namespace haris {

std::string canonical_plate(std::string_view plate) {
  std::string out;
  for (char c : plate) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

json record_to_json(const PlateLocationRecord& r) {
  return json{{"plate", r.plate},
              {"position", geo_to_json(r.position)},
              {"local_pose", {{"x", fixed_number(r.local_pose.x, 6)}, {"y", fixed_number(r.local_pose.y, 6)}}},
              {"last_seen", r.last_seen},
              {"confidence", fixed_number(r.confidence, 6)},
              {"sighting_count", r.sighting_count}};
}

std::string journal_line(const Sighting& s) {
  return json{{"plate", s.plate_read},
              {"lat", s.car_position.lat},
              {"lon", s.car_position.lon},
              {"x", s.local_position.x},
              {"y", s.local_position.y},
              {"confidence", s.confidence},
              {"timestamp", s.timestamp}}
      .dump();
}

Sighting parse_journal_line(const std::string& line) {
  const json j = json::parse(line);
  Sighting s;
  if (!j.contains("plate") || !j["plate"].is_string()) throw std::invalid_argument("missing field 'plate'");
  s.plate_read = j["plate"].get<std::string>();
  s.car_position = make_geo_point(require_number(j, "lat"), require_number(j, "lon"));
  s.local_position = {require_number(j, "x"), require_number(j, "y")};
  s.confidence = require_number(j, "confidence");
  if (!j.contains("timestamp") || !j["timestamp"].is_number_integer())
    throw std::invalid_argument("missing field 'timestamp'");
  s.timestamp = j["timestamp"].get<std::int64_t>();
  return s;
}

PlateStore::PlateStore(const std::filesystem::path& journal) : journal_(journal, std::ios::app) {
  if (!journal_) throw std::runtime_error("cannot open journal " + journal.string());
}

namespace {

// Total order on sightings of one plate; equal timestamps fall back to the
// payload so the winner does not depend on arrival order.
auto recency_key(std::int64_t t, double conf, const GeoPoint& g, Point2D p) {
  return std::make_tuple(t, conf, g.lat, g.lon, p.x, p.y);
}

}  // namespace

PlateLocationRecord PlateStore::apply(const Sighting& s) {
  const std::string plate = canonical_plate(s.plate_read);
  auto [it, inserted] = records_.try_emplace(plate);
  PlateLocationRecord& r = it->second;
  if (inserted) {
    r = {plate, s.car_position, s.local_position, s.timestamp, s.confidence, 1};
    return r;
  }
  ++r.sighting_count;
  if (recency_key(s.timestamp, s.confidence, s.car_position, s.local_position) >
      recency_key(r.last_seen, r.confidence, r.position, r.local_pose)) {
    r.position = s.car_position;
    r.local_pose = s.local_position;
    r.last_seen = s.timestamp;
    r.confidence = s.confidence;
  }
  return r;
}

PlateLocationRecord PlateStore::upsert_sighting(const Sighting& s) {
  if (canonical_plate(s.plate_read).empty()) throw std::invalid_argument("empty plate");
  if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) throw std::invalid_argument("confidence outside [0, 1]");
  std::unique_lock lock(mu_);
  if (journal_.is_open()) journal_ << journal_line(s) << '\n';
  return apply(s);
}

std::optional<PlateLocationRecord> PlateStore::lookup(std::string_view plate) const {
  std::shared_lock lock(mu_);
  const auto it = records_.find(canonical_plate(plate));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<PlateLocationRecord> PlateStore::all() const {
  std::shared_lock lock(mu_);
  std::vector<PlateLocationRecord> out;
  out.reserve(records_.size());
  for (const auto& [_, r] : records_) out.push_back(r);
  return out;
}

std::size_t PlateStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

void PlateStore::flush() {
  std::unique_lock lock(mu_);
  if (journal_.is_open()) journal_.flush();
}

std::unique_ptr<PlateStore> PlateStore::restore(const std::filesystem::path& journal, std::size_t* skipped) {
  std::vector<Sighting> replay;
  std::size_t bad = 0;
  {
    std::ifstream in(journal);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      try {
        replay.push_back(parse_journal_line(line));
      } catch (const std::exception& e) {
        ++bad;
        spdlog::warn("journal {}: skipping line {}: {}", journal.string(), n, e.what());
      }
    }
  }
  // Drop a torn tail so new appends start on a fresh line.
  if (std::filesystem::exists(journal)) {
    std::ifstream in(journal, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!text.empty() && text.back() != '\n') {
      const auto keep = text.find_last_of('\n');
      std::filesystem::resize_file(journal, keep == std::string::npos ? 0 : keep + 1);
    }
  }
  auto store = std::make_unique<PlateStore>(journal);
  for (const auto& s : replay) {
    if (canonical_plate(s.plate_read).empty() || !(s.confidence >= 0.0 && s.confidence <= 1.0)) {
      ++bad;
      continue;
    }
    store->apply(s);
  }
  if (skipped) *skipped = bad;
  return store;
}

}  // namespace haris
