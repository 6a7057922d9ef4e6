#include <stdexcept>
#include <doctest.h>

#include <cmath>

#include "duocarry/random.hpp"
#include "duocarry/terrain.hpp"
#include "oracles.hpp"

using namespace duocarry;

namespace {

TerrainConfig smallConfig(std::uint64_t seed = 7) {
  TerrainConfig cfg;
  cfg.n_levels = 12;
  cfg.grid_columns = 4;
  cfg.rng_seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("difficulty ramps linearly from zero to the maximum") {
  const TerrainConfig cfg;
  CHECK(levelDifficulty(cfg, 0) == 0.0);
  CHECK(levelDifficulty(cfg, cfg.n_levels - 1) == doctest::Approx(0.1));
  for (int i = 1; i < cfg.n_levels; ++i) CHECK(levelDifficulty(cfg, i) >= levelDifficulty(cfg, i - 1));
  TerrainConfig one;
  one.n_levels = 1;
  CHECK(levelDifficulty(one, 0) == 0.0);
}

TEST_CASE("generated curriculum terrain") {
  const TerrainConfig cfg;
  const Terrain t = generateTerrain(cfg);
  REQUIRE(t.subterrains().size() == 50);
  CHECK(t.subterrains().front().obstacles.empty());
  CHECK(t.subterrains().front().difficulty == 0.0);
  CHECK(t.subterrains().back().difficulty == doctest::Approx(0.1));
  CHECK(t.bounds().size().x == doctest::Approx(120.0));
  CHECK(t.bounds().size().y == doctest::Approx(60.0));

  double prev = -1.0;
  for (const auto& s : t.subterrains()) {
    CHECK(s.difficulty >= prev);
    prev = s.difficulty;
    double area = 0.0;
    for (const auto& b : s.obstacles) {
      CHECK(b.center.x - b.half_extents.x >= s.bounds.lo.x);
      CHECK(b.center.x + b.half_extents.x <= s.bounds.hi.x);
      CHECK(b.center.y - b.half_extents.y >= s.bounds.lo.y);
      CHECK(b.center.y + b.half_extents.y <= s.bounds.hi.y);
      CHECK(b.height == 1.0);
      CHECK(2.0 * b.half_extents.x >= cfg.size_min - 1e-12);
      CHECK(2.0 * b.half_extents.x <= cfg.size_max + 1e-12);
      CHECK(2.0 * b.half_extents.y >= cfg.size_min - 1e-12);
      CHECK(2.0 * b.half_extents.y <= cfg.size_max + 1e-12);
      area += b.area();
    }
    // Boxes never overlap, so the covered area is the sum of box areas.
    CHECK(area >= s.difficulty * s.bounds.area() * (1.0 - 1e-9));
    for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
      for (std::size_t j = i + 1; j < s.obstacles.size(); ++j) {
        const auto& a = s.obstacles[i];
        const auto& b = s.obstacles[j];
        const bool overlap = std::abs(a.center.x - b.center.x) < a.half_extents.x + b.half_extents.x &&
                             std::abs(a.center.y - b.center.y) < a.half_extents.y + b.half_extents.y;
        CHECK_FALSE(overlap);
      }
    }
  }
}

TEST_CASE("Monte-Carlo occupied fraction tracks the difficulty") {
  const Terrain t = generateTerrain(smallConfig());
  Rng rng(99);
  for (const auto& s : t.subterrains()) {
    if (s.difficulty <= 0.02) continue;
    const double f = oracle::occupiedFraction(s.obstacles, s.bounds, 200000, rng);
    CHECK(std::abs(f - s.difficulty) <= 0.2 * s.difficulty);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const Terrain a = generateTerrain(smallConfig(3));
  const Terrain b = generateTerrain(smallConfig(3));
  const Terrain c = generateTerrain(smallConfig(4));
  CHECK(a == b);
  CHECK(terrainToJson(a) == terrainToJson(b));
  CHECK_FALSE(terrainToJson(a) == terrainToJson(c));
}

TEST_CASE("terrain serialization round trip") {
  const Terrain a = generateTerrain(smallConfig(21));
  const std::string text = terrainToJson(a);
  const Terrain b = terrainFromJson(text);
  CHECK(a == b);
  CHECK(terrainToJson(b) == text);

  const Scenario dyn = makeScenario(ScenarioKind::Boxes, true);
  const Terrain d = terrainFromJson(terrainToJson(dyn.terrain));
  CHECK(d == dyn.terrain);

  CHECK_THROWS_AS(terrainFromJson("{"), std::runtime_error);
  CHECK_THROWS_AS(terrainFromJson("{\"format\": \"something-else\"}"), std::runtime_error);
}

TEST_CASE("invalid configs are rejected") {
  TerrainConfig cfg;
  cfg.size_max = 13.0;
  CHECK_THROWS_AS(generateTerrain(cfg), std::invalid_argument);
  cfg = TerrainConfig{};
  cfg.size_min = 2.0;
  cfg.size_max = 1.0;
  CHECK_THROWS_AS(generateTerrain(cfg), std::invalid_argument);
  cfg = TerrainConfig{};
  cfg.d_max = 1.5;
  CHECK_THROWS_AS(generateTerrain(cfg), std::invalid_argument);
  cfg = TerrainConfig{};
  cfg.n_levels = 0;
  CHECK_THROWS_AS(generateTerrain(cfg), std::invalid_argument);
}

TEST_CASE("height and occupancy queries") {
  const Terrain t = generateTerrain(smallConfig());
  const auto& empty = t.subterrains().front();
  CHECK(*t.heightAt(empty.bounds.center()) == 0.0);
  const auto& dense = t.subterrains().back();
  REQUIRE_FALSE(dense.obstacles.empty());
  const Vec2 c = dense.obstacles.front().center;
  CHECK(*t.heightAt(c) == 1.0);
  CHECK(*t.occupied(c));
  CHECK_FALSE(t.heightAt({-1.0, 5.0}).has_value());
  CHECK_FALSE(t.occupied({1e6, 0.0}).has_value());
  CHECK(t.subterrainAt(c).value() == t.subterrains().size() - 1);
  CHECK(t.subterrainForLevel(3).value() == 3);
  CHECK_FALSE(t.subterrainForLevel(99).has_value());
}

TEST_CASE("moving obstacle shifts by velocity times time") {
  BoxObstacle b;
  b.center = {5.0, 5.0};
  b.half_extents = {0.5, 0.5};
  b.velocity = {0.2, 0.0};
  Subterrain s;
  s.bounds = {Vec2{0.0, 0.0}, Vec2{12.0, 12.0}};
  s.obstacles = {b};
  const Terrain t(s.bounds, {s});
  CHECK(*t.occupied({5.0, 5.0}, 0.0));
  CHECK_FALSE(*t.occupied({5.0, 5.0}, 5.0));
  CHECK(*t.occupied({6.0, 5.0}, 5.0));
  CHECK_FALSE(*t.occupied({6.0, 5.0}, 0.0));
  // obstaclesNear accounts for the swept extent.
  CHECK(t.obstaclesNear(Rect{Vec2{6.4, 4.0}, Vec2{7.0, 6.0}}, 5.0).size() == 1);
  CHECK(t.obstaclesNear(Rect{Vec2{6.4, 4.0}, Vec2{7.0, 6.0}}, 0.0).empty());
}

TEST_CASE("evaluation scenarios") {
  const Scenario empty = makeScenario(ScenarioKind::Empty);
  CHECK(empty.terrain.obstacles().empty());
  REQUIRE(empty.waypoints.size() == 2);
  CHECK(empty.waypoints[0].x == doctest::Approx(3.0));
  CHECK(empty.waypoints[0].y == doctest::Approx(0.0));
  CHECK((empty.waypoints[1] - empty.waypoints[0]).norm() == doctest::Approx(5.5));
  const Vec2 d = empty.waypoints[1] - empty.waypoints[0];
  CHECK(std::atan2(d.y, d.x) == doctest::Approx(std::numbers::pi / 4.0));

  const Scenario corridor = makeScenario(ScenarioKind::Corridor);
  REQUIRE(corridor.terrain.obstacles().size() == 2);
  const auto& lo = corridor.terrain.obstacles()[0];
  const auto& hi = corridor.terrain.obstacles()[1];
  const double gap = (hi.center.y - hi.half_extents.y) - (lo.center.y + lo.half_extents.y);
  CHECK(gap == doctest::Approx(2.0));
  CHECK(lo.center.x == doctest::Approx(3.0));
  REQUIRE(corridor.waypoints.size() == 1);
  CHECK(corridor.waypoints[0].x == doctest::Approx(7.0));

  const Scenario boxes = makeScenario(ScenarioKind::Boxes);
  REQUIRE(boxes.terrain.obstacles().size() == 3);
  const auto& a = boxes.terrain.obstacles()[0];
  const auto& b = boxes.terrain.obstacles()[1];
  CHECK((b.center.y - b.half_extents.y) - (a.center.y + a.half_extents.y) == doctest::Approx(2.5));
  CHECK(boxes.terrain.obstacles()[2].center.x - a.center.x == doctest::Approx(2.5));
  CHECK(boxes.terrain.obstacles()[2].center.y == doctest::Approx(0.0));
  CHECK(boxes.waypoints.size() == 2);

  const Scenario dyn = makeScenario(ScenarioKind::Boxes, true);
  const auto& mover = dyn.terrain.obstacles()[2];
  CHECK(mover.centerAt(0.0).y == doctest::Approx(-1.25));
  CHECK(mover.centerAt(100.0).y == doctest::Approx(1.25));
  CHECK(mover.velocity.norm() == doctest::Approx(0.1));
  CHECK_THROWS_AS(makeScenario(ScenarioKind::Empty, true), std::invalid_argument);

  CHECK(parseScenario("corridor") == ScenarioKind::Corridor);
  CHECK(scenarioName(ScenarioKind::Boxes) == "boxes");
  CHECK_THROWS_AS(parseScenario("maze"), std::invalid_argument);
}
