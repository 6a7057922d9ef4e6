#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "duocarry/geometry.hpp"
#include "duocarry/terrain.hpp"

namespace duocarry {

/// Planar SE(2) velocity (v_x, v_y, omega_z).
struct Twist2 {
  Vec2 linear;
  double angular = 0.0;
  bool operator==(const Twist2&) const = default;
};

/// High-level action: per-agent base velocity commands in the object frame,
/// laid out as [v_x1, v_y1, w_z1, v_x2, v_y2, w_z2].
using Action = std::array<double, 6>;

struct AgentState {
  Pose2 pose;
  Vec2 velocity_world;
  double yaw_rate = 0.0;
  Twist2 commanded_base;  ///< last command expressed in the agent base frame
};

enum class Termination { Goal, Timeout, TiltProxy, HeightProxy };
std::string_view terminationName(Termination t);

struct SimConfig {
  double bar_length = 2.0;
  double dt = 0.05;
  double substep = 0.01;
  double tau_v = 0.3;          ///< first-order velocity lag time constant; 0 tracks instantly
  double v_max = 0.8;          ///< action bound and linear speed limit
  double omega_max = 0.8;
  Footprint footprint;
  int stand_window = 10;       ///< history length T_stand (steps)
  /// A body counts as deeply colliding above this penetration.
  double deep_penetration = 0.25;
  /// Deep penetration sustained this long ends the episode.
  double deep_duration = 1.0;

  void validate() const;
};

/// Signals which form of the object yaw-rate estimate to use. The rigid-body
/// form projects the relative velocity on the inter-agent normal; the printed
/// variant projects on the normal of the object position vector.
enum class OmegaFormula { RigidBody, PrintedPosition };

struct ObjectKinematics {
  Vec2 position;
  Vec2 velocity;
  double yaw_rate = 0.0;
};

/// Midpoint, mean velocity, and yaw rate of the object frame. Throws
/// std::domain_error when the agents coincide.
ObjectKinematics objectKinematics(const AgentState& a1, const AgentState& a2,
                                  OmegaFormula formula = OmegaFormula::RigidBody);

/// Object frame from agent positions: origin at the midpoint, y-axis from
/// agent1 to agent2, x-axis completing a right-handed frame.
Pose2 objectFrame(const Vec2& p1, const Vec2& p2);

struct SystemState {
  AgentState agent1;
  AgentState agent2;
  double bar_length = 2.0;
  double time = 0.0;
  Pose2 object_pose;
  Twist2 object_velocity;  ///< world-frame linear velocity, yaw rate
  std::deque<Vec2> history;  ///< recent object positions, oldest first

  /// psi_obj - psi_base_i, wrapped.
  double relativeYaw(int agent) const;
  double agentDistance() const { return (agent2.pose.position - agent1.pose.position).norm(); }
};

enum class Body { Agent1 = 0, Agent2 = 1, Bar = 2 };

struct Contact {
  Body body = Body::Agent1;
  double penetration = 0.0;
};

struct StepOutcome {
  SystemState state;
  std::vector<Contact> contacts;
  std::optional<Termination> terminated;
  int clamped_components = 0;
  bool deep_collision = false;
};

/// Places the agents at -/+ L/2 along the object y-axis with zero
/// velocities; agent i gets yaw = object yaw + yaw_offset_i. Throws
/// std::invalid_argument when the placement collides.
SystemState resetSystem(const Terrain& terrain, const Pose2& start, const SimConfig& cfg,
                        double yaw_offset1 = 0.0, double yaw_offset2 = 0.0);

/// Penetration depth of each body at time t (bodies with zero depth omitted).
std::vector<Contact> gatherContacts(const SystemState& state, const Terrain& terrain, const SimConfig& cfg);

struct TerminationLimits {
  double max_time = 70.0;
  double reach_radius = 0.5;
};

/// Kinematic two-agent simulator with a rigid bar constraint. One instance
/// per episode; not shared across threads.
class Simulator {
 public:
  Simulator(const Terrain& terrain, SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const Terrain& terrain() const { return *terrain_; }
  const SystemState& state() const { return state_; }

  void reset(const Pose2& start, double yaw_offset1 = 0.0, double yaw_offset2 = 0.0);
  void setState(const SystemState& s) { state_ = s; }

  /// Advances one high-level period. Out-of-range action components are
  /// clamped and counted. `goal`, when set, enables goal termination.
  StepOutcome step(const Action& action, const std::optional<Vec2>& goal = std::nullopt,
                   const TerminationLimits& limits = {});

  int totalClamped() const { return total_clamped_; }

 private:
  const Terrain* terrain_;
  SimConfig cfg_;
  SystemState state_;
  std::array<double, 3> deep_time_{};  // per body, seconds of sustained deep contact
  int total_clamped_ = 0;
};

/// Goal when the object is within reach of the final waypoint, timeout once
/// time reaches the limit, and the tilt/height proxies when an agent body or
/// the bar has stayed deeply embedded for the configured duration.
std::optional<Termination> checkTermination(const SystemState& state, const std::optional<Vec2>& goal,
                                            const std::array<double, 3>& deep_time, const SimConfig& cfg,
                                            const TerminationLimits& limits);

}  // namespace duocarry
