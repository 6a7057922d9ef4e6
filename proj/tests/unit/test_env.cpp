#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "duocarry/config.hpp"
#include "duocarry/env.hpp"

using namespace duocarry;

namespace {

HeightMap policyGrid(double fill = 0.0) {
  HeightMap m(Pose2{}, 13, 20, 0.3);
  for (auto& v : m.valid) v = 1;
  for (auto& h : m.cells) h = fill;
  return m;
}

Observation restingObservation(Vec2 cmd) {
  SystemState s;
  s.agent1.pose.position = {0.0, -1.0};
  s.agent2.pose.position = {0.0, 1.0};
  s.object_pose = Pose2{{0.0, 0.0}, 0.0};
  return observe(s, cmd, Action{}, policyGrid());
}

}  // namespace

TEST_CASE("observation layout is pinned index by index") {
  SystemState s;
  s.object_pose = Pose2{{1.0, 2.0}, std::numbers::pi / 2.0};
  s.object_velocity = Twist2{{0.0, 0.5}, 0.1};
  s.agent1.pose = Pose2{{2.0, 2.0}, std::numbers::pi / 2.0 - 0.1};
  s.agent1.velocity_world = {-0.2, 0.3};
  s.agent1.yaw_rate = 0.05;
  s.agent2.pose = Pose2{{0.0, 2.0}, std::numbers::pi / 2.0 + 0.2};
  s.agent2.velocity_world = {0.1, 0.0};
  s.agent2.yaw_rate = -0.05;
  HeightMap m = policyGrid();
  for (std::size_t i = 0; i < m.size(); ++i) m.cells[i] = 0.01 * static_cast<double>(i);
  const Action last{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const Observation o = observe(s, {0.6, 0.8}, last, m, PolicyMapConfig{}, 0.5);

  const std::vector<double> expected_proprio{0.5, 0.0, 0.1, 0.6, 0.8, 0.1, 0.2, 0.3, 0.4,  0.5,
                                             0.6, 0.3, 0.2, 0.05, 0.0, -0.1, -0.05, 0.1, -0.2};
  const std::vector<double> flat = o.flatten();
  REQUIRE(flat.size() == 279);
  for (std::size_t i = 0; i < expected_proprio.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(flat[i] - expected_proprio[i]) <= 1e-12);
  }
  for (std::size_t i = 0; i < 260; ++i) {
    CAPTURE(i);
    CHECK(std::abs(flat[19 + i] - (0.01 * static_cast<double>(i) - 0.5)) <= 1e-12);
  }
  CHECK(o.command() == Vec2{0.6, 0.8});
  CHECK(o.relativeYaw(1) == doctest::Approx(0.1));
  CHECK(o.relativeYaw(2) == doctest::Approx(-0.2));
}

TEST_CASE("observation of a system at rest") {
  const Observation o = restingObservation({1.0, 0.0});
  CHECK(o.size() == 279);
  for (std::size_t i = 0; i < Observation::kProprio; ++i) CHECK(o.proprio[i] == (i == 3 ? 1.0 : 0.0));
}

TEST_CASE("observation errors") {
  SystemState s;
  s.agent2.pose.position = {0.0, 2.0};
  HeightMap wrong(Pose2{}, 10, 20, 0.3);
  CHECK_THROWS_AS(observe(s, {}, Action{}, wrong), std::invalid_argument);
  HeightMap bad = policyGrid();
  bad.cells[17] = std::nan("");
  CHECK_THROWS_AS(observe(s, {}, Action{}, bad), std::domain_error);
  CHECK_THROWS_AS(observe(s, {std::nan(""), 0.0}, Action{}, policyGrid()), std::domain_error);
}

TEST_CASE("action bounding is odd, monotone, and strictly bounded") {
  CHECK(boundAction(Action{})[0] == 0.0);
  CHECK(boundAction(Action{1e9, 0, 0, 0, 0, 0})[0] == doctest::Approx(0.8));
  double prev = -1.0;
  for (double r = -10.0; r <= 10.0; r += 0.01) {
    const Action a = boundAction(Action{r, -r, 0, 0, 0, 0});
    CHECK(a[0] == -a[1]);
    CHECK(std::abs(a[0]) < 0.8);
    CHECK(a[0] > prev);
    prev = a[0];
  }
  CHECK(boundAction(Action{0.01, 0, 0, 0, 0, 0})[0] == doctest::Approx(0.01).epsilon(1e-4));
}

TEST_CASE("split and rejoin are lossless") {
  SystemState s;
  s.agent1.pose.position = {0.0, -1.0};
  s.agent2.pose.position = {0.0, 1.0};
  s.agent1.velocity_world = {0.1, 0.2};
  s.agent2.velocity_world = {-0.3, 0.4};
  s.object_velocity = Twist2{{0.5, 0.6}, 0.7};
  HeightMap m = policyGrid();
  for (std::size_t i = 0; i < m.size(); ++i) m.cells[i] = static_cast<double>(i);
  const Observation o = observe(s, {0.0, 1.0}, Action{}, m);
  const auto [a, b] = splitObservation(o);
  CHECK(rejoinMaps(a, b) == o.extero);
  CHECK(a.map_half.size() + b.map_half.size() == 260);
  CHECK(a.half_cols == 10);
  CHECK(a.map_half[10] == 20.0);
  CHECK(b.map_half[0] == 10.0);
  CHECK(a.own_velocity[0] == doctest::Approx(0.1));
  CHECK(b.own_velocity[0] == doctest::Approx(-0.3));
  CHECK(a.object_velocity == b.object_velocity);
  CHECK(a.command == b.command);
  CHECK(a.flatten().size() == 9 + 130);
}

TEST_CASE("tracker follows the command on an empty map") {
  TrackerConfig cfg;
  cfg.yaw_gain = 0.0;
  const Action a = boundAction(heuristicTracker(restingObservation({1.0, 0.0}), cfg));
  CHECK(a[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(0.0));
  CHECK(a[3] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(a[4] == doctest::Approx(0.0));

  // With yaw alignment on, the pair turns while its midpoint moves along +x.
  const Action t = boundAction(heuristicTracker(restingObservation({1.0, 0.0})));
  CHECK((t[0] + t[3]) / 2.0 > 0.3);
  CHECK(t[1] + t[4] == doctest::Approx(0.0));
  CHECK(t[3] > t[0]);

  // Command along the bar needs no turning.
  const Action along = boundAction(heuristicTracker(restingObservation({0.0, 1.0})));
  CHECK(along[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(along[4] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(along[0] == doctest::Approx(0.0));
  CHECK(along[2] == doctest::Approx(0.0));
}

TEST_CASE("a wall of high cells ahead slows the tracker") {
  TrackerConfig cfg;
  cfg.yaw_gain = 0.0;
  Observation free = restingObservation({1.0, 0.0});
  Observation walled = free;
  for (int r = 8; r <= 9; ++r)
    for (int c = 0; c < 20; ++c) walled.extero[static_cast<std::size_t>(r * 20 + c)] = 1.0;
  const Action a = boundAction(heuristicTracker(free, cfg));
  const Action b = boundAction(heuristicTracker(walled, cfg));
  CHECK(b[0] < a[0]);
  CHECK(b[3] < a[3]);
  for (double v : b) CHECK(std::abs(v) < 0.8);
}

TEST_CASE("zero actions time out with the stand penalty") {
  const Scenario sc = makeScenario(ScenarioKind::Empty);
  EpisodeConfig cfg;
  cfg.path.waypoints = sc.waypoints;
  cfg.max_steps = 100;
  const EpisodeOutcome out = runEpisode(sc.terrain, sc.start, cfg, [](const Observation&) { return Action{}; });
  CHECK(out.termination == Termination::Timeout);
  CHECK(out.steps == 100);
  CHECK(out.term_sums[7] == doctest::Approx(-0.1 * 100));
  CHECK(out.lengths.object == 0.0);
  CHECK(out.reached_fraction == 0.0);
  CHECK(out.log.size() == 101);
}

TEST_CASE("stepping a finished episode is an error") {
  const Scenario sc = makeScenario(ScenarioKind::Empty);
  EpisodeConfig cfg;
  cfg.path.waypoints = sc.waypoints;
  cfg.max_steps = 1;
  Environment env(sc.terrain, cfg);
  env.reset(sc.start);
  env.step(Action{});
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(Action{}), std::logic_error);
  EpisodeConfig bad = cfg;
  bad.path.waypoints.clear();
  CHECK_THROWS_AS(Environment(sc.terrain, bad), std::invalid_argument);
}

TEST_CASE("tracker reaches the goal on the empty scenario and episodes are deterministic") {
  const Scenario sc = makeScenario(ScenarioKind::Empty);
  const AppConfig app;
  const EpisodeConfig cfg = episodeConfig(app, sc.waypoints, 3);
  const Controller ctl = [&](const Observation& o) { return heuristicTracker(o, app.tracker); };
  const EpisodeOutcome a = runEpisode(sc.terrain, sc.start, cfg, ctl);
  const EpisodeOutcome b = runEpisode(sc.terrain, sc.start, cfg, ctl);
  CHECK(a.termination == Termination::Goal);
  CHECK(a.reached_fraction == 1.0);
  CHECK(a.deep_collision_steps == 0);
  CHECK(trajectoryToCsv(a.log) == trajectoryToCsv(b.log));
  CHECK(a.total_reward == b.total_reward);
}

TEST_CASE("curriculum is updated once per episode") {
  TerrainConfig tcfg;
  tcfg.n_levels = 3;
  tcfg.grid_columns = 3;
  const Terrain t = generateTerrain(tcfg);
  const Rect b0 = t.subterrains()[0].bounds;
  PathAssignment p;
  p.level = 0;
  p.waypoints = {b0.lo + Vec2{3.0, 6.0}, b0.lo + Vec2{9.0, 6.0}};
  EpisodeConfig cfg;
  cfg.path = p;
  cfg.max_steps = 600;
  Rng rng(3);

  CurriculumState up{0, 2};
  const EpisodeOutcome good =
      runCurriculumEpisode(t, {p}, up, cfg, [](const Observation& o) { return heuristicTracker(o); }, rng);
  CHECK(good.reached_fraction > 0.5);
  CHECK(up.level == 1);

  CurriculumState stay{0, 2};
  cfg.max_steps = 20;
  const EpisodeOutcome idle =
      runCurriculumEpisode(t, {p}, stay, cfg, [](const Observation&) { return Action{}; }, rng);
  // The start waypoint counts as reached, which lands in the dead zone.
  CHECK(idle.reached_fraction == doctest::Approx(0.5));
  CHECK(stay.level == 0);

  CurriculumState none{2, 2};
  CHECK_THROWS_AS(runCurriculumEpisode(t, {p}, none, cfg, [](const Observation&) { return Action{}; }, rng),
                  std::runtime_error);
}
