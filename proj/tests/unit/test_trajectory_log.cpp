#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "duocarry/random.hpp"
#include "duocarry/trajectory_log.hpp"

using namespace duocarry;

namespace {

TrajectoryLog sampled(double duration, double rate, Vec2 (*path)(double)) {
  TrajectoryLog log;
  const int n = static_cast<int>(std::lround(duration * rate));
  for (int k = 0; k <= n; ++k) {
    LogRecord r;
    r.step = k;
    r.time = k / rate;
    r.object.position = path(r.time);
    r.agent1.position = r.object.position + Vec2{0.0, -1.0};
    r.agent2.position = r.object.position + Vec2{0.0, 1.0};
    log.push_back(r);
  }
  return log;
}

}  // namespace

TEST_CASE("csv round trip reproduces every value") {
  Rng rng(8);
  TrajectoryLog log;
  for (int k = 0; k < 50; ++k) {
    LogRecord r;
    r.step = k;
    r.time = 0.05 * k;
    r.agent1 = Pose2{{rng.uniform(-9, 9), rng.uniform(-9, 9)}, rng.uniform(-3, 3)};
    r.agent2 = Pose2{{rng.uniform(-9, 9), rng.uniform(-9, 9)}, rng.uniform(-3, 3)};
    r.agent1_velocity = {rng.uniform(-1, 1), 1.0 / 3.0};
    r.agent2_yaw_rate = rng.uniform(-1, 1);
    r.object = Pose2{{rng.uniform(-9, 9), 1e-300}, rng.uniform(-3, 3)};
    r.object_velocity = Twist2{{rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-1, 1)};
    for (auto& a : r.action) a = rng.uniform(-0.8, 0.8);
    r.reward.tracking = rng.uniform(-0.5, 0.5);
    r.reward.contacts = -25.0;
    r.reward.total = r.reward.tracking + r.reward.contacts;
    r.penetration = {0.0, 0.01, 0.3};
    log.push_back(r);
  }
  const std::string text = trajectoryToCsv(log);
  const TrajectoryLog back = trajectoryFromCsv(text);
  CHECK(trajectoryToCsv(back) == text);
  REQUIRE(back.size() == log.size());
  CHECK(back[7].agent1.position == log[7].agent1.position);
  CHECK(back[7].agent1_velocity.y == 1.0 / 3.0);
  CHECK(back[3].object.position.y == 1e-300);
  CHECK(back[9].action == log[9].action);
  CHECK(back[9].reward.total == log[9].reward.total);
  CHECK(back[9].penetration == log[9].penetration);

  CHECK_THROWS_AS(trajectoryFromCsv("step,time\n1,2\n"), std::runtime_error);
  const std::string header = text.substr(0, text.find('\n') + 1);
  CHECK_THROWS_AS(trajectoryFromCsv(header + "0,abc\n"), std::runtime_error);
  CHECK(trajectoryFromCsv(header).empty());
}

TEST_CASE("path lengths of a straight line") {
  const TrajectoryLog log = sampled(10.0, 20.0, [](double t) { return Vec2{0.6 * t, 0.3 * t}; });
  const PathLengths l = pathLengths(log);
  const double exact = 10.0 * std::hypot(0.6, 0.3);
  CHECK(std::abs(l.object - exact) <= 1e-3 * exact);
  CHECK(std::abs(l.agent1 - exact) <= 1e-3 * exact);
  CHECK(std::abs(l.agent2 - exact) <= 1e-3 * exact);
}

TEST_CASE("path lengths of a circle sampled at 20 Hz") {
  // Radius 2 m at 0.5 m/s for one full turn.
  const double period = 2.0 * std::numbers::pi * 2.0 / 0.5;
  const TrajectoryLog log = sampled(period, 20.0, [](double t) {
    const double a = 0.25 * t;
    return Vec2{2.0 * std::cos(a), 2.0 * std::sin(a)};
  });
  const double exact = 0.5 * log.back().time;
  CHECK(std::abs(pathLengths(log).object - exact) <= 1e-3 * exact);
}

TEST_CASE("polyline length and frame export") {
  CHECK(polylineLength({}) == 0.0);
  CHECK(polylineLength({{1.0, 1.0}}) == 0.0);
  CHECK(polylineLength({{0.0, 0.0}, {3.0, 4.0}, {3.0, 0.0}}) == doctest::Approx(9.0));
  const TrajectoryLog log = sampled(1.0, 20.0, [](double t) { return Vec2{t, 0.0}; });
  const std::string paths = exportFramePaths(log);
  CHECK(paths.rfind("frame,step,time,x,y\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : paths) lines += c == '\n';
  CHECK(lines == 1 + 3 * log.size());
}
