#pragma once

#include <string>

#include "json.hpp"

#include "haris/geo.hpp"
#include "haris/geometry.hpp"

namespace haris {

using nlohmann::json;

/// A number that dump_json renders with exactly `digits` fractional digits.
json fixed_number(double value, int digits = 9);

/// json::dump that expands fixed_number placeholders into plain JSON numbers.
std::string dump_json(const json& j, int indent = -1);

json geo_to_json(const GeoPoint& g);
/// Throws std::invalid_argument naming the missing/invalid field.
GeoPoint geo_from_json(const json& j);

json pose_to_json(const Pose2D& p);
Pose2D pose_from_json(const json& j);

/// Typed field access with a diagnostic naming `field` on failure.
double require_number(const json& j, const std::string& field);

}  // namespace haris
