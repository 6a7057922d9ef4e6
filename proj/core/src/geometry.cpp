#include "duocarry/geometry.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace duocarry {

double wrapAngle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  if (w > std::numbers::pi) w -= kTwoPi;
  return w;
}

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 worldToFrame(const Vec2& p_world, const Pose2& frame) {
  return rotate(p_world - frame.position, -frame.yaw);
}

Vec2 frameToWorld(const Vec2& p_frame, const Pose2& frame) {
  return rotate(p_frame, frame.yaw) + frame.position;
}

Vec2 vectorToFrame(const Vec2& v_world, const Pose2& frame) { return rotate(v_world, -frame.yaw); }

Vec2 vectorToWorld(const Vec2& v_frame, const Pose2& frame) { return rotate(v_frame, frame.yaw); }

Vec2 BoxObstacle::centerAt(double t) const {
  if (isStatic()) return center;
  const double tm = std::clamp(t, 0.0, motion_end);
  return center + velocity * tm;
}

void BoxObstacle::validate() const {
  if (!(half_extents.x > 0.0 && half_extents.y > 0.0))
    throw std::invalid_argument("box half extents must be positive");
  if (!(height > 0.0)) throw std::invalid_argument("box height must be positive");
}

namespace {

// Penetration depth of a box-local point; positive inside.
double insideDepth(const Vec2& d, const Vec2& h) {
  return std::min(h.x - std::abs(d.x), h.y - std::abs(d.y));
}

double pointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + ab * s - p).norm();
}

}  // namespace

double pointBoxDistance(const Vec2& p, const BoxObstacle& box, double t) {
  const Vec2 d = p - box.centerAt(t);
  const double qx = std::abs(d.x) - box.half_extents.x;
  const double qy = std::abs(d.y) - box.half_extents.y;
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  const double inside = std::min(std::max(qx, qy), 0.0);
  return outside + inside;
}

double segmentBoxDistance(const Vec2& a, const Vec2& b, const BoxObstacle& box, double t) {
  const Vec2 c = box.centerAt(t);
  const Vec2 h = box.half_extents;
  const Vec2 da = a - c;
  const Vec2 dir = b - a;

  // Depth along the segment is concave and piecewise linear, so its maximum
  // sits at an endpoint or a kink.
  std::array<double, 8> candidates{};
  std::size_t n = 0;
  candidates[n++] = 0.0;
  candidates[n++] = 1.0;
  if (dir.x != 0.0) candidates[n++] = -da.x / dir.x;
  if (dir.y != 0.0) candidates[n++] = -da.y / dir.y;
  // |dx| - |dy| = hx - hy, for each sign pattern.
  for (const double sx : {1.0, -1.0}) {
    for (const double sy : {1.0, -1.0}) {
      const double denom = sx * dir.x - sy * dir.y;
      if (denom != 0.0 && n < candidates.size())
        candidates[n++] = (h.x - h.y - sx * da.x + sy * da.y) / denom;
    }
  }
  double max_depth = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::clamp(candidates[i], 0.0, 1.0);
    max_depth = std::max(max_depth, insideDepth(da + dir * s, h));
  }
  if (max_depth > 0.0) return -max_depth;

  double best = std::min(pointBoxDistance(a, box, t), pointBoxDistance(b, box, t));
  for (const double sx : {1.0, -1.0}) {
    for (const double sy : {1.0, -1.0}) {
      best = std::min(best, pointSegmentDistance(c + Vec2{sx * h.x, sy * h.y}, a, b));
    }
  }
  return best;
}

namespace {

std::array<Vec2, 4> footprintCorners(const Pose2& pose, const Footprint& fp) {
  const Vec2 u = pose.xAxis() * fp.half_length;
  const Vec2 v = pose.yAxis() * fp.half_width;
  const Vec2 p = pose.position;
  return {p + u + v, p - u + v, p - u - v, p + u - v};
}

// Minimum overlap over the four separating axes; <= 0 means separated.
double satMinOverlap(const Pose2& pose, const Footprint& fp, const BoxObstacle& box, double t) {
  const Vec2 c = box.centerAt(t);
  const Vec2 h = box.half_extents;
  const auto corners = footprintCorners(pose, fp);
  const std::array<Vec2, 4> box_corners{c + Vec2{h.x, h.y}, c + Vec2{-h.x, h.y},
                                        c + Vec2{-h.x, -h.y}, c + Vec2{h.x, -h.y}};
  const std::array<Vec2, 4> axes{Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, pose.xAxis(), pose.yAxis()};
  double min_overlap = std::numeric_limits<double>::infinity();
  for (const Vec2& axis : axes) {
    double a_lo = std::numeric_limits<double>::infinity(), a_hi = -a_lo;
    double b_lo = a_lo, b_hi = -a_lo;
    for (const Vec2& q : corners) {
      const double s = q.dot(axis);
      a_lo = std::min(a_lo, s);
      a_hi = std::max(a_hi, s);
    }
    for (const Vec2& q : box_corners) {
      const double s = q.dot(axis);
      b_lo = std::min(b_lo, s);
      b_hi = std::max(b_hi, s);
    }
    min_overlap = std::min(min_overlap, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
  }
  return min_overlap;
}

}  // namespace

bool orientedFootprintCollides(const Pose2& pose, const Footprint& fp, const BoxObstacle& box,
                               double t) {
  return satMinOverlap(pose, fp, box, t) > 0.0;
}

double footprintBoxSeparation(const Pose2& pose, const Footprint& fp, const BoxObstacle& box,
                              double t) {
  const double overlap = satMinOverlap(pose, fp, box, t);
  if (overlap > 0.0) return -overlap;
  const auto corners = footprintCorners(pose, fp);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corners.size(); ++i) {
    best = std::min(best, segmentBoxDistance(corners[i], corners[(i + 1) % 4], box, t));
  }
  return std::max(best, 0.0);
}

double nearestObstacleDistance(const Vec2& p, std::span<const BoxObstacle> boxes, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) best = std::min(best, pointBoxDistance(p, b, t));
  return best;
}

}  // namespace duocarry
