#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "duocarry/geometry.hpp"
#include "duocarry/terrain.hpp"
#include "duocarry/trajectory_log.hpp"
#include "duocarry/waypoint_graph.hpp"

namespace duocarry {

/// Object pose plus each agent's yaw relative to the bar: agent i has yaw
/// object.yaw + psi_i.
struct SystemConfiguration {
  Pose2 object;
  double psi1 = 0.0;
  double psi2 = 0.0;
};

enum class PrmMode { Local, Full };
std::string_view prmModeName(PrmMode mode);

struct PrmConfig {
  int n_samples = 1500;
  int k_neighbors = 5;
  int n_interp = 5;
  PrmMode mode = PrmMode::Full;
  double max_pose_step = 0.5;   ///< meters between successive poses
  double yaw_weight = 0.5;      ///< metric weight of each angle difference
  double window_length = 4.0;   ///< local window along the object x-axis
  double window_width = 6.0;    ///< local window along the object y-axis
  int replan_budget = 200;
  double exec_speed = 0.8;      ///< kinematic follower speed, m/s
  double exec_dt = 0.05;
  double bar_length = 2.0;
  Footprint footprint;
  double reach_radius = 0.5;
  int max_sample_attempts = 200000;
  int start_connect_tries = 20;
  /// Greedy shortcutting of each planned leg (off returns raw roadmap paths).
  bool shortcut = true;

  /// Throws std::invalid_argument unless n_samples >= k_neighbors + 1 and
  /// the remaining values are positive.
  void validate() const;
};

Pose2 agentPose(const SystemConfiguration& c, int agent, double bar_length);

/// Both footprints and the bar segment are clear of every box at time t.
bool feasible(const SystemConfiguration& c, std::span<const BoxObstacle> boxes, double t, double bar_length,
              const Footprint& fp);
bool feasible(const SystemConfiguration& c, const Terrain& terrain, double t, double bar_length = 2.0,
              const Footprint& fp = {});

/// Weighted configuration metric: position distance plus yaw_weight times
/// the sum of absolute shortest-arc angle differences.
double configDistance(const SystemConfiguration& a, const SystemConfiguration& b, double yaw_weight = 0.5);

/// Componentwise linear interpolation with shortest-arc angles; s in [0, 1].
SystemConfiguration interpolate(const SystemConfiguration& a, const SystemConfiguration& b, double s);

/// Number of interior points used on an edge: at least n_interp, more when
/// needed to keep successive poses within max_pose_step.
int interiorCount(const SystemConfiguration& a, const SystemConfiguration& b, const PrmConfig& cfg);

/// Endpoints plus interior points of an edge.
std::vector<SystemConfiguration> interpolateEdge(const SystemConfiguration& a, const SystemConfiguration& b,
                                                 int interior);

/// Sampling domain: a rectangle of the given half extents in `frame`.
struct SamplingRegion {
  Pose2 frame;
  Vec2 half_extents;

  static SamplingRegion fromRect(const Rect& r);
  bool contains(const Vec2& p_world) const;
  Rect boundingBox() const;
};

struct Roadmap {
  std::vector<SystemConfiguration> nodes;
  Adjacency edges;
  std::vector<BoxObstacle> obstacles;  ///< obstacles the roadmap was validated against
  double time = 0.0;
  /// Both agent footprints of every stored or interpolated configuration
  /// lie inside this region.
  SamplingRegion workspace;
};

/// Both agent footprints lie entirely inside the region.
bool insideRegion(const SystemConfiguration& c, const SamplingRegion& region, double bar_length, const Footprint& fp);

/// Samples n_samples feasible configurations whose bodies stay inside the
/// region (yaws uniform on the circle) and links each to its k nearest neighbors when every
/// interpolated configuration is feasible. Throws std::runtime_error when no
/// feasible sample is found.
Roadmap buildRoadmap(std::span<const BoxObstacle> obstacles, const SamplingRegion& region, const PrmConfig& cfg,
                     std::uint64_t seed, double t = 0.0);

/// Sequence from `start` through roadmap nodes to the node closest to
/// `goal`, followed by an exact goal configuration when it connects.
/// Empty when the start cannot be connected. Throws std::invalid_argument
/// for an infeasible start.
std::vector<SystemConfiguration> plan(const SystemConfiguration& start, const Vec2& goal, const Roadmap& roadmap,
                                      const PrmConfig& cfg);

/// Replaces runs of configurations by direct edges whenever every
/// interpolated configuration of the direct edge is feasible. The first and
/// last configurations are kept.
std::vector<SystemConfiguration> shortcutPath(const std::vector<SystemConfiguration>& path, const Roadmap& roadmap,
                                              const PrmConfig& cfg);

enum class PrmStatus { Success, PlanningFailure, ExecutionCollision, BudgetExhausted };
std::string_view prmStatusName(PrmStatus s);

struct PrmRun {
  PrmStatus status = PrmStatus::PlanningFailure;
  std::vector<SystemConfiguration> executed;  ///< every interpolated configuration
  TrajectoryLog log;
  PathLengths lengths;
  int plans = 0;
  double planning_seconds = 0.0;
  double duration = 0.0;  ///< simulated execution time
};

/// Interpolates a plan and follows it kinematically, checking feasibility
/// against the true terrain at each interpolant's time. Appends to `run`.
/// Returns false on a collision.
bool execute(const std::vector<SystemConfiguration>& plan_steps, const Terrain& terrain, const PrmConfig& cfg,
             PrmRun& run);

/// Plans through the waypoints in order (full map or receding local
/// windows) and executes the result. Deterministic per seed.
PrmRun runPrm(const Terrain& terrain, const Pose2& start, const std::vector<Vec2>& waypoints, const PrmConfig& cfg,
              std::uint64_t seed);

}  // namespace duocarry
