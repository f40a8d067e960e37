#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "haris/alpr.hpp"
#include "haris/json_util.hpp"

namespace haris {

struct PlateLocationRecord {
  std::string plate;
  GeoPoint position;
  Point2D local_pose;
  std::int64_t last_seen = 0;  // ms
  double confidence = 0.0;
  std::uint64_t sighting_count = 0;

  friend bool operator==(const PlateLocationRecord&, const PlateLocationRecord&) = default;
};

/// Uppercase with all whitespace removed.
std::string canonical_plate(std::string_view plate);

json record_to_json(const PlateLocationRecord& r);

/// Plate -> last known location. Readers share, writers serialize. With a
/// journal path every accepted sighting is appended as one JSON line.
class PlateStore {
 public:
  PlateStore() = default;
  explicit PlateStore(const std::filesystem::path& journal);
  PlateStore(const PlateStore&) = delete;
  PlateStore& operator=(const PlateStore&) = delete;

  /// Last-write-wins on timestamp; an older sighting only bumps the count.
  /// Throws std::invalid_argument for an empty plate or confidence outside [0, 1].
  PlateLocationRecord upsert_sighting(const Sighting& s);

  std::optional<PlateLocationRecord> lookup(std::string_view plate) const;
  std::vector<PlateLocationRecord> all() const;  // sorted by plate
  std::size_t size() const;

  /// Pushes buffered journal lines to disk.
  void flush();

  /// Replays a journal into a fresh store that keeps appending to it.
  /// Unparseable lines are skipped with a warning; `skipped` receives their count.
  static std::unique_ptr<PlateStore> restore(const std::filesystem::path& journal, std::size_t* skipped = nullptr);

 private:
  PlateLocationRecord apply(const Sighting& s);

  mutable std::shared_mutex mu_;
  std::map<std::string, PlateLocationRecord> records_;
  std::ofstream journal_;
};

/// One journal line for a sighting (exact double round-trip).
std::string journal_line(const Sighting& s);
/// Inverse of journal_line; throws on malformed input.
Sighting parse_journal_line(const std::string& line);

}  // namespace haris
