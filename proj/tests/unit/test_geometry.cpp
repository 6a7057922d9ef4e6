#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "duocarry/geometry.hpp"
#include "oracles.hpp"

using namespace duocarry;

namespace {

BoxObstacle unitBox(Vec2 c = {0.0, 0.0}, Vec2 h = {1.0, 1.0}) {
  BoxObstacle b;
  b.center = c;
  b.half_extents = h;
  return b;
}

}  // namespace

TEST_CASE("point to box signed distance") {
  const BoxObstacle b = unitBox();
  CHECK(pointBoxDistance({3.0, 0.0}, b) == doctest::Approx(2.0));
  CHECK(pointBoxDistance({0.0, 0.0}, b) == doctest::Approx(-1.0));
  CHECK(pointBoxDistance({2.0, 2.0}, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK(pointBoxDistance({1.0, 0.3}, b) == doctest::Approx(0.0));
}

TEST_CASE("moving box is displaced by velocity times time") {
  BoxObstacle b = unitBox();
  b.velocity = {0.2, 0.0};
  CHECK(pointBoxDistance({3.0, 0.0}, b, 0.0) == doctest::Approx(2.0));
  CHECK(pointBoxDistance({3.0, 0.0}, b, 5.0) == doctest::Approx(1.0));
  b.motion_end = 2.5;
  CHECK(pointBoxDistance({3.0, 0.0}, b, 5.0) == doctest::Approx(1.5));
}

TEST_CASE("segment to box distance") {
  const BoxObstacle b = unitBox();
  CHECK(segmentBoxDistance({-2.0, 3.0}, {2.0, 3.0}, b) == doctest::Approx(2.0));
  CHECK(segmentBoxDistance({-2.0, 0.0}, {2.0, 0.0}, b) < 0.0);
  CHECK(segmentBoxDistance({-2.0, 0.0}, {2.0, 0.0}, b) == doctest::Approx(-1.0));
  CHECK(segmentBoxDistance({2.0, 2.0}, {3.0, 3.0}, b) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("segment distance agrees with dense sampling") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0), h(0.2, 1.5);
  for (int i = 0; i < 2000; ++i) {
    const BoxObstacle b = unitBox({u(rng), u(rng)}, {h(rng), h(rng)});
    const Vec2 a{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double got = segmentBoxDistance(a, c, b);
    const double want = oracle::segmentBox(a, c, oracle::boxAt(b, 0.0));
    CHECK(std::abs(got - want) <= 1e-3);
  }
}

TEST_CASE("footprint collision basics") {
  const BoxObstacle b = unitBox();
  const Footprint fp;
  CHECK_FALSE(orientedFootprintCollides(Pose2{{10.0, 10.0}, 0.3}, fp, b));
  CHECK(orientedFootprintCollides(Pose2{{0.0, 0.0}, 0.7}, fp, b));
  // Touching along an edge is not an overlap.
  const Footprint half{0.5, 0.25};
  CHECK_FALSE(orientedFootprintCollides(Pose2{{1.5, 0.0}, 0.0}, half, b));
  CHECK(orientedFootprintCollides(Pose2{{1.49, 0.0}, 0.0}, half, b));
  CHECK(footprintBoxSeparation(Pose2{{1.5, 0.0}, 0.0}, fp, b) == doctest::Approx(0.1));
  CHECK(footprintBoxSeparation(Pose2{{1.3, 0.0}, 0.0}, fp, b) == doctest::Approx(-0.1));
}

TEST_CASE("45 degree footprint grazing a corner matches point sampling") {
  const BoxObstacle b = unitBox();
  const Footprint fp;
  for (double gap : {-0.05, -0.01, -0.003, 0.003, 0.01, 0.05}) {
    // Footprint at 45 degrees, its corner pointing at the box corner (1, 1).
    const double r = std::sqrt(2.0) + fp.half_length + gap;
    const Pose2 pose{{r / std::sqrt(2.0), r / std::sqrt(2.0)}, std::numbers::pi / 4.0};
    const bool got = orientedFootprintCollides(pose, fp, b);
    CHECK(got == (gap < 0.0));
    const bool sampled = oracle::rectBoxOverlapSampled(pose, fp.half_length, fp.half_width, oracle::boxAt(b, 0.0), 0.0);
    CHECK(sampled == got);
  }
}

TEST_CASE("footprint predicate agrees with point sampling on random pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-2.5, 2.5), yaw(-std::numbers::pi, std::numbers::pi), h(0.3, 1.0);
  const Footprint fp;
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const BoxObstacle b = unitBox({0.0, 0.0}, {h(rng), h(rng)});
    const Pose2 pose{{pos(rng), pos(rng)}, yaw(rng)};
    const bool got = orientedFootprintCollides(pose, fp, b);
    const auto ob = oracle::boxAt(b, 0.0);
    if (oracle::rectBoxOverlapSampled(pose, fp.half_length, fp.half_width, ob, -0.5e-3)) {
      CHECK(got);
      ++checked;
    }
    if (!oracle::rectBoxOverlapSampled(pose, fp.half_length, fp.half_width, ob, 0.5e-3)) {
      CHECK_FALSE(got);
      ++checked;
    }
    CHECK((footprintBoxSeparation(pose, fp, b) < 0.0) == got);
  }
  CHECK(checked >= 490);
}

TEST_CASE("world to frame transforms") {
  const Vec2 p{1.5, -2.0};
  const Vec2 same = worldToFrame(p, Pose2{});
  CHECK(same.x == p.x);
  CHECK(same.y == p.y);
  const Vec2 q = worldToFrame({0.0, 1.0}, Pose2{{0.0, 0.0}, std::numbers::pi / 2.0});
  CHECK(q.x == doctest::Approx(1.0));
  CHECK(q.y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("frame round trip is the identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0), yaw(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 10000; ++i) {
    const Pose2 f{{u(rng), u(rng)}, yaw(rng)};
    const Vec2 p{u(rng), u(rng)};
    const Vec2 back = frameToWorld(worldToFrame(p, f), f);
    CHECK(std::abs(back.x - p.x) <= 1e-12);
    CHECK(std::abs(back.y - p.y) <= 1e-12);
    const Vec2 v = vectorToWorld(vectorToFrame(p, f), f);
    CHECK(std::abs(v.x - p.x) <= 1e-12);
    CHECK(std::abs(v.y - p.y) <= 1e-12);
  }
}

TEST_CASE("signed distance is 1-Lipschitz") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0), e(-1e-3, 1e-3);
  const BoxObstacle b = unitBox({0.2, -0.1}, {0.7, 1.1});
  for (int i = 0; i < 20000; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const Vec2 eps{e(rng), e(rng)};
    const double diff = std::abs(pointBoxDistance(p, b) - pointBoxDistance(p + eps, b));
    CHECK(diff <= eps.norm() * (1.0 + 1e-9));
  }
}

TEST_CASE("point distance matches the independent formula") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0), h(0.1, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const BoxObstacle b = unitBox({u(rng), u(rng)}, {h(rng), h(rng)});
    const Vec2 p{u(rng), u(rng)};
    CHECK(pointBoxDistance(p, b) == doctest::Approx(oracle::pointBox(p.x, p.y, oracle::boxAt(b, 0.0))).epsilon(1e-12));
  }
}

TEST_CASE("angle wrapping") {
  CHECK(wrapAngle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrapAngle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrapAngle(3.0 * std::numbers::pi / 2.0) == doctest::Approx(-std::numbers::pi / 2.0));
  CHECK(angleDiff(170.0 * std::numbers::pi / 180.0, -170.0 * std::numbers::pi / 180.0) ==
        doctest::Approx(20.0 * std::numbers::pi / 180.0));
}

TEST_CASE("invalid boxes are rejected") {
  BoxObstacle b = unitBox();
  b.half_extents = {0.0, 1.0};
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = unitBox();
  b.height = -1.0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("nearest obstacle distance") {
  const std::vector<BoxObstacle> boxes{unitBox({5.0, 0.0}), unitBox({-3.0, 0.0})};
  CHECK(nearestObstacleDistance({0.0, 0.0}, boxes) == doctest::Approx(2.0));
  CHECK(std::isinf(nearestObstacleDistance({0.0, 0.0}, std::vector<BoxObstacle>{})));
}
