#include "haris/json_util.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace haris {

namespace {
constexpr const char* kFixedTag = "\x01num:";
}

json fixed_number(double value, int digits) {
  if (!std::isfinite(value)) return json(nullptr);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return json(std::string(kFixedTag) + buf);
}

std::string dump_json(const json& j, int indent) {
  std::string s = j.dump(indent);
  // The tag byte is escaped by dump() as \u0001.
  const std::string open = "\"\\u0001num:";
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (true) {
    const std::size_t k = s.find(open, pos);
    if (k == std::string::npos) {
      out.append(s, pos, std::string::npos);
      break;
    }
    out.append(s, pos, k - pos);
    const std::size_t start = k + open.size();
    const std::size_t end = s.find('"', start);
    out.append(s, start, end - start);
    pos = end + 1;
  }
  return out;
}

double require_number(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains(field)) throw std::invalid_argument("missing field '" + field + "'");
  const json& v = j.at(field);
  if (!v.is_number()) throw std::invalid_argument("field '" + field + "' must be a number");
  return v.get<double>();
}

json geo_to_json(const GeoPoint& g) {
  return json{{"lat", fixed_number(g.lat)}, {"lon", fixed_number(g.lon)}};
}

GeoPoint geo_from_json(const json& j) {
  return make_geo_point(require_number(j, "lat"), require_number(j, "lon"));
}

json pose_to_json(const Pose2D& p) {
  return json{{"x", fixed_number(p.x, 6)}, {"y", fixed_number(p.y, 6)}, {"theta", fixed_number(p.theta, 6)}};
}

Pose2D pose_from_json(const json& j) {
  return {require_number(j, "x"), require_number(j, "y"), require_number(j, "theta")};
}

}  // namespace haris
