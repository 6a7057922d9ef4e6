#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "duocarry/elevation.hpp"
#include "duocarry/env.hpp"
#include "duocarry/prm.hpp"
#include "duocarry/reward.hpp"
#include "duocarry/system_sim.hpp"
#include "duocarry/terrain.hpp"
#include "duocarry/waypoint_graph.hpp"

namespace duocarry {

/// Every tunable of the stack in one place. Defaults reproduce the
/// published training and evaluation setup.
struct AppConfig {
  TerrainConfig terrain;
  GraphSamplingConfig graph;
  PathSamplingConfig paths;
  SimConfig sim;
  RewardConfig reward;
  SensorConfig sensor;
  PolicyMapConfig policy_map;
  AugmentConfig augment;
  bool augment_maps = false;
  bool relative_heights = false;
  double reach_radius = 0.5;
  double max_time = 70.0;
  double start_jitter_position = 0.1;
  double start_jitter_yaw = 0.0872664625997164788;  // 5 degrees
  TrackerConfig tracker;
  PrmConfig prm;
  int threads = 0;  ///< 0 picks the hardware concurrency

  /// Validates every section; throws std::invalid_argument.
  void validate() const;
};

/// Parses a JSON document. Missing keys keep their defaults; unknown keys,
/// wrong types, and out-of-range values throw std::invalid_argument with
/// the offending key path.
AppConfig configFromJson(std::string_view text);
AppConfig loadConfig(const std::string& path);
std::string configToJson(const AppConfig& cfg);
/// JSON Schema describing the accepted document, with defaults.
std::string configSchemaJson();

/// Episode settings for one evaluation run on a scenario.
EpisodeConfig episodeConfig(const AppConfig& cfg, const std::vector<Vec2>& waypoints, std::uint64_t seed);

}  // namespace duocarry
