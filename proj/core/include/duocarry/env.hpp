#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "duocarry/elevation.hpp"
#include "duocarry/random.hpp"
#include "duocarry/reward.hpp"
#include "duocarry/system_sim.hpp"
#include "duocarry/terrain.hpp"
#include "duocarry/trajectory_log.hpp"
#include "duocarry/waypoint_graph.hpp"

namespace duocarry {

/// Centralized observation. Proprioceptive layout:
///   [0..2]   object v_x, v_y, omega_z (object frame)
///   [3..4]   command
///   [5..10]  last action
///   [11..16] agent1 v_x, v_y, omega_z then agent2 (object frame)
///   [17..18] relative yaws psi_obj - psi_base_i
/// followed by the fused height map, row-major.
struct Observation {
  static constexpr std::size_t kProprio = 19;
  std::array<double, kProprio> proprio{};
  std::vector<double> extero;
  int map_rows = 13;
  int map_cols = 20;

  std::size_t size() const { return kProprio + extero.size(); }
  std::vector<double> flatten() const;
  Vec2 command() const { return {proprio[3], proprio[4]}; }
  Twist2 objectVelocity() const { return {{proprio[0], proprio[1]}, proprio[2]}; }
  double relativeYaw(int agent) const { return proprio[agent == 1 ? 17 : 18]; }
};

/// What one agent sees in decentralized execution.
struct LocalObservation {
  std::array<double, 3> object_velocity{};
  Vec2 command;
  std::array<double, 3> own_velocity{};
  double own_relative_yaw = 0.0;
  std::vector<double> map_half;  ///< row-major, map_rows x half_cols
  int map_rows = 0;
  int half_cols = 0;

  std::vector<double> flatten() const;
};

/// Builds the observation. The map must have the configured dimensions
/// (std::invalid_argument otherwise); `reference_height` is subtracted from
/// every map cell. Throws std::domain_error if any entry is non-finite.
Observation observe(const SystemState& state, const Vec2& command, const Action& last_action,
                    const HeightMap& fused_map, const PolicyMapConfig& map_cfg = {},
                    double reference_height = 0.0);

/// Componentwise v_max * tanh(raw / v_max).
Action boundAction(const Action& raw, double v_max = 0.8);

/// Agent1 takes the map columns on the object's -y side, agent2 the rest.
std::pair<LocalObservation, LocalObservation> splitObservation(const Observation& obs);
/// Inverse of the map partition done by splitObservation.
std::vector<double> rejoinMaps(const LocalObservation& agent1, const LocalObservation& agent2);

struct TrackerConfig {
  double speed = 0.6;
  double yaw_gain = 1.0;
  double yaw_rate_max = 0.6;
  double relative_yaw_gain = 1.0;
  double repulsion_gain = 0.6;
  double repulsion_cutoff = 1.0;   ///< meters from a body point
  double repulsion_max = 0.5;      ///< cap on each agent's repulsive speed
  double height_threshold = 0.5;   ///< cells above this count as obstacles
  double bar_length = 2.0;
  double v_max = 0.8;
  /// Desired velocities are pre-compensated for the tanh stage up to this
  /// fraction of v_max.
  double saturation = 0.95;
  PolicyMapConfig map;
};

/// Hand-written tracking controller: common velocity along the command,
/// object yaw steered so its y-axis lines up with the command, and a
/// repulsive term from tall cells near the agents and the bar.
/// Returns a raw (pre-tanh) action.
Action heuristicTracker(const Observation& obs, const TrackerConfig& cfg = {});

struct EpisodeConfig {
  int max_steps = 1400;
  std::uint64_t seed = 0;
  PathAssignment path;
  SimConfig sim;
  RewardConfig reward;
  SensorConfig sensor;
  PolicyMapConfig policy_map;
  AugmentConfig augment;
  bool augment_maps = false;
  bool relative_heights = false;
  double v_min = -0.8;
  double v_max = 0.8;
  double reach_radius = 0.5;
  double start_jitter_position = 0.0;  ///< uniform, meters
  double start_jitter_yaw = 0.0;       ///< uniform, radians

  /// Throws std::invalid_argument for an empty path, non-positive step
  /// budget, or asymmetric action bounds.
  void validate() const;
};

struct StepResult {
  Observation observation;
  RewardBreakdown reward;
  Action action{};  ///< bounded action actually applied
  std::optional<Termination> termination;
  bool deep_collision = false;
  std::vector<Contact> contacts;
};

/// Step/reset shell around the simulator. One instance per thread.
class Environment {
 public:
  Environment(const Terrain& terrain, EpisodeConfig cfg);

  /// Starts an episode at `start`, perturbed by the configured jitter drawn
  /// from the episode seed.
  Observation reset(const Pose2& start);
  /// Bounds the raw action, advances the simulator, and scores the step.
  /// Throws std::logic_error once the episode has terminated.
  StepResult step(const Action& raw_action);

  const SystemState& state() const { return sim_.state(); }
  const PathAssignment& path() const { return path_; }
  const TrajectoryLog& log() const { return log_; }
  const EpisodeConfig& config() const { return cfg_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }

 private:
  Observation makeObservation();

  const Terrain* terrain_;
  EpisodeConfig cfg_;
  Simulator sim_;
  PathAssignment path_;
  Vec2 command_;
  Action last_action_{};
  TrajectoryLog log_;
  int steps_ = 0;
  bool done_ = true;
};

using Controller = std::function<Action(const Observation&)>;

struct EpisodeOutcome {
  Termination termination = Termination::Timeout;
  double reached_fraction = 0.0;
  PathLengths lengths;
  double total_reward = 0.0;
  std::array<double, RewardBreakdown::kTerms> term_sums{};
  int steps = 0;
  int deep_collision_steps = 0;
  TrajectoryLog log;
};

EpisodeOutcome runEpisode(const Terrain& terrain, const Pose2& start, const EpisodeConfig& cfg,
                          const Controller& controller);

/// Training-style episode on the curriculum terrain: draws a path at the
/// current level, picks a collision-free start along its first segment, runs
/// the episode, then applies the curriculum update exactly once. Throws
/// std::runtime_error when no path of the level admits a start.
EpisodeOutcome runCurriculumEpisode(const Terrain& terrain, const std::vector<PathAssignment>& paths,
                                    CurriculumState& curriculum, const EpisodeConfig& cfg,
                                    const Controller& controller, Rng& rng);

}  // namespace duocarry
