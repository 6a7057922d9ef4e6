#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "duocarry/geometry.hpp"
#include "duocarry/system_sim.hpp"

namespace duocarry {

/// Reward weights and shaping constants. Defaults are the published
/// training values; the weights are applied exactly as configured, so the
/// negative w1/w2 defaults turn the tracking and alignment terms into
/// penalties. Flip their signs in the config to reward them instead.
struct RewardConfig {
  double w1 = -0.5;      ///< command tracking
  double w2 = -0.5;      ///< object y-axis alignment
  double w3 = -7.5;      ///< obstacle distance
  double w4 = -0.2;      ///< internal forces
  double w5 = -2.5;      ///< undesired contacts
  double w6 = -0.1;      ///< stand in place
  double w7 = -0.001;    ///< object acceleration
  double w8 = -0.0005;   ///< action rate
  double w9 = -0.1;      ///< base yaw rates
  double alpha = 10.0;   ///< obstacle distance decay, 1/m
  double beta = 15.0;    ///< stand-still decay, 1/m
  double d_s_base = 0.6;
  double d_s_obj = 0.2;
  double delta = 2.0;    ///< obstacle distance activation threshold
  double tau = 0.15;     ///< stand-still displacement threshold
  int t_stand = 10;
  double contact_threshold = 1.0;
  double contact_stiffness = 1000.0;  ///< force proxy per meter of penetration
  double rest_speed = 1e-3;           ///< tracking term is 0 below this object speed

  /// Throws std::invalid_argument unless delta > both safety radii and t_stand >= 1.
  void validate() const;
};

struct RewardBreakdown {
  double tracking = 0.0;
  double alignment = 0.0;
  double dist_obj = 0.0;
  double dist_base1 = 0.0;
  double dist_base2 = 0.0;
  double internal_forces = 0.0;
  double contacts = 0.0;
  double stand = 0.0;
  double obj_acc = 0.0;
  double action_rate = 0.0;
  double ang_vel = 0.0;
  double total = 0.0;

  static constexpr std::size_t kTerms = 11;
  std::array<double, kTerms> terms() const;
  static const std::array<std::string_view, kTerms>& termNames();
  /// Sets `total` to the sum of the term fields.
  void finalize();
};

double trackingReward(const RewardConfig& cfg, const Vec2& cmd, const Vec2& v_obj_xy);
double alignmentReward(const RewardConfig& cfg, const Vec2& cmd);
double obstaclePenalty(const RewardConfig& cfg, double d_min, double d_s);
double internalForcePenalty(const RewardConfig& cfg, const Action& action);
/// `penetrations` are depths in meters, one per body.
double contactPenalty(const RewardConfig& cfg, std::span<const double> penetrations);
/// `history` holds T_stand + 1 consecutive object positions.
double standPenalty(const RewardConfig& cfg, std::span<const Vec2> history);

struct Regularizers {
  double obj_acc = 0.0;
  double action_rate = 0.0;
  double ang_vel = 0.0;
};

Regularizers regularizers(const RewardConfig& cfg, const Vec2& v_obj_prev, const Vec2& v_obj, double dt,
                          const Action& action_prev, const Action& action, double yaw_rate_base1,
                          double yaw_rate_base2);

/// Everything needed to score one high-level step.
struct RewardInputs {
  Vec2 command;            ///< unit, object frame
  Vec2 object_velocity;    ///< object frame
  Vec2 object_velocity_prev_world;
  Vec2 object_velocity_world;
  double dt = 0.05;
  double d_min_obj = std::numeric_limits<double>::infinity();
  double d_min_base1 = std::numeric_limits<double>::infinity();
  double d_min_base2 = std::numeric_limits<double>::infinity();
  Action action{};
  Action action_prev{};
  std::vector<double> penetrations;
  std::vector<Vec2> history;
  double yaw_rate_base1 = 0.0;
  double yaw_rate_base2 = 0.0;
};

RewardBreakdown computeReward(const RewardConfig& cfg, const RewardInputs& in);

}  // namespace duocarry
