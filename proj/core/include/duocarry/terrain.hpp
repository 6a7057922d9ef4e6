#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duocarry/geometry.hpp"

namespace duocarry {

struct Rect {
  Vec2 lo;
  Vec2 hi;

  bool contains(const Vec2& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  bool intersects(const Rect& o) const {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
  }
  Vec2 center() const { return (lo + hi) * 0.5; }
  Vec2 size() const { return hi - lo; }
  double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
  bool operator==(const Rect&) const = default;
};

/// Curriculum terrain parameters. Defaults follow the training setup: 50
/// levels ramping obstacle density up to 10%, 1 m tall boxes of 1.0-1.5 m.
struct TerrainConfig {
  int n_levels = 50;
  double d_max = 0.1;
  double obstacle_height = 1.0;
  double size_min = 1.0;
  double size_max = 1.5;
  double subterrain_extent = 12.0;
  int grid_columns = 10;
  std::uint64_t rng_seed = 0;
  int max_placement_attempts = 10000;

  void validate() const;
};

struct Subterrain {
  int level = 0;
  Rect bounds;
  double difficulty = 0.0;
  std::vector<BoxObstacle> obstacles;
};

class Terrain {
 public:
  Terrain() = default;
  Terrain(Rect bounds, std::vector<Subterrain> subterrains);

  const Rect& bounds() const { return bounds_; }
  const std::vector<Subterrain>& subterrains() const { return subterrains_; }
  /// Every obstacle of every subterrain, in subterrain order.
  const std::vector<BoxObstacle>& obstacles() const { return all_obstacles_; }

  /// Obstacles whose footprint at any time in [0, t] may touch `region`.
  std::vector<BoxObstacle> obstaclesNear(const Rect& region, double t) const;

  /// Index of the subterrain containing p, if any.
  std::optional<std::size_t> subterrainAt(const Vec2& p) const;
  /// First subterrain at the given curriculum level.
  std::optional<std::size_t> subterrainForLevel(int level) const;

  /// Ground-truth height at p and time t; nullopt outside the terrain.
  std::optional<double> heightAt(const Vec2& p, double t = 0.0) const;
  std::optional<bool> occupied(const Vec2& p, double t = 0.0) const;

  bool operator==(const Terrain& o) const;

 private:
  Rect bounds_;
  std::vector<Subterrain> subterrains_;
  std::vector<BoxObstacle> all_obstacles_;
};

double levelDifficulty(const TerrainConfig& cfg, int level);

/// Deterministic procedural curriculum terrain. Throws std::invalid_argument
/// for invalid configs and std::runtime_error when placement is exhausted.
Terrain generateTerrain(const TerrainConfig& cfg);

enum class ScenarioKind { Empty, Corridor, Boxes };

std::string_view scenarioName(ScenarioKind kind);
/// Parses "empty" | "corridor" | "boxes"; throws std::invalid_argument.
ScenarioKind parseScenario(std::string_view name);

struct Scenario {
  ScenarioKind kind = ScenarioKind::Empty;
  bool dynamic = false;
  Terrain terrain;
  std::vector<Vec2> waypoints;
  Pose2 start;
};

/// Fixed evaluation layouts. The object frame starts at the origin facing +x.
Scenario makeScenario(ScenarioKind kind, bool dynamic = false);

std::string terrainToJson(const Terrain& terrain);
/// Throws std::runtime_error on malformed input.
Terrain terrainFromJson(std::string_view text);

}  // namespace duocarry
