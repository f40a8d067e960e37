#include <random>

#include "doctest.h"
#include "haris/geo.hpp"
#include "haris/json_util.hpp"
#include "support/oracles.hpp"

using namespace haris;
using doctest::Approx;

TEST_CASE("to_local examples") {
  const GeoReference ref{{25.0, 51.0}, 0.0};
  const Point2D o = to_local(ref, ref.origin);
  CHECK(o.x == 0.0);
  CHECK(o.y == 0.0);

  const GeoPoint g{25.0 + 100.0 / 111194.9, 51.0};
  CHECK(oracle::haversine(ref.origin, g) == Approx(100.0).epsilon(1e-4));
  const Point2D p = to_local(ref, g);
  CHECK(std::abs(p.x) < 0.1);
  CHECK(std::abs(p.y - 100.0) < 0.1);

  // With the local x axis pointing north, north displacement lands on +x.
  const Point2D q = to_local({{25.0, 51.0}, M_PI / 2}, g);
  CHECK(std::abs(q.x - 100.0) < 0.1);
  CHECK(std::abs(q.y) < 0.1);
}

TEST_CASE("to_gps examples") {
  const GeoReference ref{{25.0, 51.0}, 0.0};
  CHECK(to_gps(ref, {0, 0}) == ref.origin);
  const GeoPoint g = to_gps(ref, {0, 111.1949});
  CHECK(std::abs(g.lat - 25.001) < 1e-6);
  CHECK(std::abs(g.lon - 51.0) < 1e-6);
}

TEST_CASE("east displacement follows the cosine of latitude") {
  const GeoReference ref{{60.0, 10.0}, 0.0};
  const GeoPoint g = to_gps(ref, {1000.0, 0.0});
  CHECK(g.lat == ref.origin.lat);
  CHECK(oracle::haversine(ref.origin, g) == Approx(1000.0).epsilon(1e-4));
}

TEST_CASE("projection range is enforced") {
  const GeoReference ref{{25.0, 51.0}, 0.0};
  CHECK_THROWS_AS(to_gps(ref, {60000.0, 0.0}), OutOfProjectionRange);
  CHECK_THROWS_AS(to_local(ref, {26.0, 51.0}), OutOfProjectionRange);
  CHECK_NOTHROW(to_gps(ref, {49000.0, 0.0}));
}

TEST_CASE("geo points validate ranges") {
  CHECK_THROWS_AS(make_geo_point(95.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_geo_point(0.0, 181.0), std::invalid_argument);
  CHECK_THROWS_AS(make_geo_point(NAN, 0.0), std::invalid_argument);
  CHECK(normalize_longitude(-180.0) == Approx(180.0));
  CHECK(normalize_longitude(190.0) == Approx(-170.0));
}

TEST_CASE("round trip near the antimeridian") {
  const GeoReference ref{{-33.0, 179.999}, 0.4};
  for (double x : {-500.0, 0.0, 500.0}) {
    const GeoPoint g = to_gps(ref, {x, 300.0});
    CHECK(g.lon > -180.0);
    CHECK(g.lon <= 180.0);
    const Point2D back = to_local(ref, g);
    CHECK(back.x == Approx(x).epsilon(1e-9));
    CHECK(back.y == Approx(300.0).epsilon(1e-9));
  }
}

TEST_CASE("bearing and heading offset conventions") {
  CHECK(heading_offset_from_bearing(0.0) == Approx(M_PI / 2));   // x axis due north
  CHECK(heading_offset_from_bearing(M_PI / 2) == Approx(0.0));   // x axis due east
  CHECK(bearing_from_heading_offset(heading_offset_from_bearing(0.3)) == Approx(0.3));
  // A compass bearing of 90 deg (east) reproduces the unrotated frame.
  const GeoReference east{{25.0, 51.0}, heading_offset_from_bearing(M_PI / 2)};
  const GeoPoint g = to_gps(east, {100.0, 0.0});
  CHECK(g.lon > 51.0);
  CHECK(std::abs(g.lat - 25.0) < 1e-12);
}

TEST_CASE("resync examples") {
  const GeoReference ref{{25.0, 51.0}, 0.2};
  const GeoReference same = resync(ref, ref.origin, ref.heading_offset, {0, 0, 0});
  CHECK(same.origin.lat == Approx(ref.origin.lat).epsilon(1e-15));
  CHECK(same.origin.lon == Approx(ref.origin.lon).epsilon(1e-15));
  CHECK(same.heading_offset == Approx(ref.heading_offset));

  // Robot believes it is 0.5 m east of the station and rotated by 0.1 rad.
  const GeoPoint station = ref.origin;
  const double station_heading = ref.heading_offset;
  const Pose2D measured{0.5, 0.0, 0.1};
  const GeoReference fixed = resync(ref, station, station_heading, measured);
  const GeoPoint at = to_gps(fixed, measured.position());
  CHECK(std::abs(at.lat - station.lat) <= 1e-12);
  CHECK(std::abs(at.lon - station.lon) <= 1e-12);
  CHECK(normalize_angle(fixed.heading_offset + measured.theta - station_heading) == Approx(0.0));

  // Rigid correction oracle: a point 2 m ahead of the measured pose must land
  // 2 m ahead of the station along the station heading.
  const Point2D ahead = transform_point(measured, {2.0, 0.0});
  const Point2D en = to_local({station, 0.0}, to_gps(fixed, ahead));
  CHECK(en.x == Approx(2.0 * std::cos(station_heading)).epsilon(1e-6));
  CHECK(en.y == Approx(2.0 * std::sin(station_heading)).epsilon(1e-6));

  const GeoReference twice = resync(fixed, station, station_heading, measured);
  CHECK(twice == resync(fixed, station, station_heading, measured));
}

TEST_CASE("round trip and distance preservation over random references") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-60.0, 60.0), lon(-180.0, 180.0), ang(-M_PI, M_PI), dist(1.0, 2000.0);
  for (int r = 0; r < 10; ++r) {
    const GeoReference ref{make_geo_point(lat(rng), lon(rng)), ang(rng)};
    for (int i = 0; i < 100; ++i) {
      const double d = dist(rng), b = ang(rng);
      const Point2D p{d * std::cos(b), d * std::sin(b)};
      const GeoPoint g = to_gps(ref, p);
      const GeoPoint back = to_gps(ref, to_local(ref, g));
      CHECK(std::abs(back.lat - g.lat) <= 1e-9);
      CHECK(std::abs(normalize_longitude(back.lon - g.lon)) <= 1e-9);
      CHECK(std::abs(oracle::haversine(ref.origin, g) - d) / d <= 1e-3);
    }
  }
}

TEST_CASE("fixed-digit JSON numbers") {
  const json j = {{"lat", fixed_number(25.123456789123, 9)}, {"x", fixed_number(-0.5, 3)}, {"n", 4}};
  const std::string s = dump_json(j);
  CHECK(s.find("\"lat\":25.123456789") != std::string::npos);
  CHECK(s.find("\"x\":-0.500") != std::string::npos);
  const json back = json::parse(s);
  CHECK(back["lat"].get<double>() == Approx(25.123456789));
  CHECK(back["n"] == 4);

  const GeoPoint g{25.375512345, 51.489987654};
  const json gj = json::parse(dump_json(geo_to_json(g)));
  CHECK(geo_from_json(gj).lat == Approx(g.lat).epsilon(1e-12));
  CHECK_THROWS_AS(geo_from_json(json{{"lat", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(require_number(json{{"a", "x"}}, "a"), std::invalid_argument);

  const Pose2D p{1.25, -3.5, 0.75};
  const Pose2D pb = pose_from_json(json::parse(dump_json(pose_to_json(p))));
  CHECK(pb.x == Approx(p.x));
  CHECK(pb.theta == Approx(p.theta));
}
