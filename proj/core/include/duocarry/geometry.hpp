#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace duocarry {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double squaredNorm() const { return x * x + y * y; }
  /// Counter-clockwise quarter turn.
  constexpr Vec2 perp() const { return {-y, x}; }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Wraps an angle to (-pi, pi].
double wrapAngle(double a);

/// Signed shortest-arc difference b - a, in (-pi, pi].
inline double angleDiff(double a, double b) { return wrapAngle(b - a); }

Vec2 rotate(const Vec2& v, double angle);

struct Pose2 {
  Vec2 position;
  double yaw = 0.0;

  constexpr bool operator==(const Pose2&) const = default;

  Vec2 xAxis() const { return {std::cos(yaw), std::sin(yaw)}; }
  Vec2 yAxis() const { return {-std::sin(yaw), std::cos(yaw)}; }
};

/// Expresses a world point in the given frame (inverse rigid transform).
Vec2 worldToFrame(const Vec2& p_world, const Pose2& frame);
/// Maps a frame-local point back to world coordinates.
Vec2 frameToWorld(const Vec2& p_frame, const Pose2& frame);
/// Rotates a world-frame vector into the frame's axes (no translation).
Vec2 vectorToFrame(const Vec2& v_world, const Pose2& frame);
Vec2 vectorToWorld(const Vec2& v_frame, const Pose2& frame);

/// Axis-aligned box obstacle. Moving boxes translate rigidly with `velocity`
/// until `motion_end` seconds, then stay put.
struct BoxObstacle {
  Vec2 center;
  Vec2 half_extents{0.5, 0.5};
  double height = 1.0;
  Vec2 velocity;
  double motion_end = std::numeric_limits<double>::infinity();

  bool isStatic() const { return velocity.x == 0.0 && velocity.y == 0.0; }
  Vec2 centerAt(double t) const;
  double area() const { return 4.0 * half_extents.x * half_extents.y; }
  /// Throws std::invalid_argument unless extents and height are positive.
  void validate() const;
};

/// Agent collision body: a rectangle aligned with the agent's base frame.
struct Footprint {
  double half_length = 0.40;
  double half_width = 0.25;
};

/// Signed distance from p to the box at time t: positive outside, negative
/// inside (penetration depth), zero on the boundary.
double pointBoxDistance(const Vec2& p, const BoxObstacle& box, double t = 0.0);

/// Minimum signed distance between segment ab and the box. Negative iff the
/// segment reaches the box interior; the magnitude is then the deepest
/// penetration of any segment point.
double segmentBoxDistance(const Vec2& a, const Vec2& b, const BoxObstacle& box, double t = 0.0);

/// Separating-axis overlap test between the oriented footprint at `pose` and
/// the box. Touching boundaries do not count as overlap.
bool orientedFootprintCollides(const Pose2& pose, const Footprint& fp, const BoxObstacle& box,
                               double t = 0.0);

/// Signed separation between footprint and box: the minimum SAT overlap
/// (negated) when they intersect, the Euclidean gap otherwise.
double footprintBoxSeparation(const Pose2& pose, const Footprint& fp, const BoxObstacle& box,
                              double t = 0.0);

/// Minimum of pointBoxDistance over the obstacle list; +inf when empty.
double nearestObstacleDistance(const Vec2& p, std::span<const BoxObstacle> boxes, double t = 0.0);

}  // namespace duocarry
