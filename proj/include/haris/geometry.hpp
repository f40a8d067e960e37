#pragma once

#include <cmath>
#include <numbers>

namespace haris {

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
inline Point2D operator*(double s, Point2D p) { return {s * p.x, s * p.y}; }

inline double norm(Point2D p) { return std::hypot(p.x, p.y); }
inline double distance(Point2D a, Point2D b) { return norm(a - b); }
inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }

inline Point2D rotate(Point2D p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// x forward, y left, theta counter-clockwise.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  static Pose2D identity() { return {}; }

  Point2D position() const { return {x, y}; }

  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

/// a∘b: b expressed in a's frame, lifted to a's parent frame.
inline Pose2D compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta};
}

inline Pose2D inverse(const Pose2D& p) {
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return {-c * p.x - s * p.y, s * p.x - c * p.y, -p.theta};
}

/// Maps a point given in the pose's frame into the parent frame.
inline Point2D transform_point(const Pose2D& frame, Point2D p) {
  const double c = std::cos(frame.theta);
  const double s = std::sin(frame.theta);
  return {frame.x + c * p.x - s * p.y, frame.y + s * p.x + c * p.y};
}

/// Relative motion from `from` to `to`, expressed in `from`'s frame.
inline Pose2D relative(const Pose2D& from, const Pose2D& to) {
  return compose(inverse(from), to);
}

struct Twist {
  double v = 0.0;      // m/s, forward
  double omega = 0.0;  // rad/s, counter-clockwise

  friend bool operator==(const Twist&, const Twist&) = default;
};

/// Velocity and turn-rate limits of a robot.
struct RobotProfile {
  double v_max = 1.0;
  double omega_max = 1.5;
  double radius = 0.25;
};

inline Twist clamp_twist(Twist t, const RobotProfile& profile) {
  auto clamp = [](double v, double lim) { return v > lim ? lim : (v < -lim ? -lim : v); };
  return {clamp(t.v, profile.v_max), clamp(t.omega, profile.omega_max)};
}

/// Exact constant-twist arc over dt (unicycle kinematics, no obstacles).
inline Pose2D integrate_unicycle(const Pose2D& p, Twist cmd, double dt) {
  if (std::abs(cmd.omega) < 1e-9) {
    return {p.x + cmd.v * dt * std::cos(p.theta), p.y + cmd.v * dt * std::sin(p.theta), p.theta};
  }
  const double r = cmd.v / cmd.omega;
  const double th1 = p.theta + cmd.omega * dt;
  return {p.x + r * (std::sin(th1) - std::sin(p.theta)), p.y - r * (std::cos(th1) - std::cos(p.theta)), th1};
}

struct Segment {
  Point2D a;
  Point2D b;
};

/// Distance from p to the closed segment s.
inline double segment_distance(const Segment& s, Point2D p) {
  const Point2D d = s.b - s.a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return distance(s.a + t * d, p);
}

/// Distance along the unit ray (origin, dir) to segment s, if it is hit.
inline bool ray_segment(Point2D origin, Point2D dir, const Segment& s, double& t_out) {
  const Point2D e = s.b - s.a;
  const double denom = cross(dir, e);
  if (std::abs(denom) < 1e-15) return false;
  const Point2D w = s.a - origin;
  const double t = cross(w, e) / denom;
  const double u = cross(w, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return false;
  t_out = t;
  return true;
}

}  // namespace haris
