#include "duocarry/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace duocarry {

void RewardConfig::validate() const {
  if (!(delta > d_s_base) || !(delta > d_s_obj)) throw std::invalid_argument("delta must exceed the safety radii");
  if (t_stand < 1) throw std::invalid_argument("t_stand must be >= 1");
  if (contact_stiffness < 0.0 || rest_speed < 0.0) throw std::invalid_argument("negative reward constant");
}

std::array<double, RewardBreakdown::kTerms> RewardBreakdown::terms() const {
  return {tracking, alignment, dist_obj, dist_base1, dist_base2, internal_forces,
          contacts, stand,     obj_acc,  action_rate, ang_vel};
}

const std::array<std::string_view, RewardBreakdown::kTerms>& RewardBreakdown::termNames() {
  static const std::array<std::string_view, kTerms> names{
      "r_track", "r_align", "p_dist_obj", "p_dist_base1", "p_dist_base2", "p_int_forces",
      "p_contacts", "p_stand", "p_obj_acc", "p_action_rate", "p_ang_vel"};
  return names;
}

void RewardBreakdown::finalize() {
  total = 0.0;
  for (const double v : terms()) total += v;
}

double trackingReward(const RewardConfig& cfg, const Vec2& cmd, const Vec2& v_obj_xy) {
  const double speed = v_obj_xy.norm();
  if (!(speed > cfg.rest_speed)) return 0.0;
  return cfg.w1 * cmd.dot(v_obj_xy / speed);
}

double alignmentReward(const RewardConfig& cfg, const Vec2& cmd) {
  const double e = std::abs(std::atan2(cmd.y, cmd.x)) - std::numbers::pi / 2.0;
  return cfg.w2 * e * e;
}

double obstaclePenalty(const RewardConfig& cfg, double d_min, double d_s) {
  if (!(d_min < cfg.delta)) return 0.0;
  return cfg.w3 * std::exp(-cfg.alpha * (d_min - d_s));
}

double internalForcePenalty(const RewardConfig& cfg, const Action& action) {
  return cfg.w4 * std::exp(std::abs(action[1] - action[4]) - 1.0);
}

double contactPenalty(const RewardConfig& cfg, std::span<const double> penetrations) {
  double sum = 0.0;
  for (const double p : penetrations) {
    const double force = cfg.contact_stiffness * p;
    if (force > cfg.contact_threshold) sum += force;
  }
  return cfg.w5 * sum;
}

double standPenalty(const RewardConfig& cfg, std::span<const Vec2> history) {
  if (history.size() < 2) return 0.0;
  double dx = 0.0, dy = 0.0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    dx += std::abs(history[i].x - history[i - 1].x);
    dy += std::abs(history[i].y - history[i - 1].y);
  }
  if (dx < cfg.tau && dy < cfg.tau) return cfg.w6 * std::exp(-cfg.beta * std::sqrt(dx * dx + dy * dy));
  return 0.0;
}

Regularizers regularizers(const RewardConfig& cfg, const Vec2& v_obj_prev, const Vec2& v_obj, double dt,
                          const Action& action_prev, const Action& action, double yaw_rate_base1,
                          double yaw_rate_base2) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Regularizers r;
  r.obj_acc = cfg.w7 * ((v_obj - v_obj_prev) / dt).squaredNorm();
  double da = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) da += (action_prev[i] - action[i]) * (action_prev[i] - action[i]);
  r.action_rate = cfg.w8 * std::sqrt(da);
  r.ang_vel = cfg.w9 * (yaw_rate_base1 * yaw_rate_base1 + yaw_rate_base2 * yaw_rate_base2);
  return r;
}

RewardBreakdown computeReward(const RewardConfig& cfg, const RewardInputs& in) {
  RewardBreakdown b;
  b.tracking = trackingReward(cfg, in.command, in.object_velocity);
  b.alignment = alignmentReward(cfg, in.command);
  b.dist_obj = obstaclePenalty(cfg, in.d_min_obj, cfg.d_s_obj);
  b.dist_base1 = obstaclePenalty(cfg, in.d_min_base1, cfg.d_s_base);
  b.dist_base2 = obstaclePenalty(cfg, in.d_min_base2, cfg.d_s_base);
  b.internal_forces = internalForcePenalty(cfg, in.action);
  b.contacts = contactPenalty(cfg, in.penetrations);
  b.stand = standPenalty(cfg, in.history);
  const auto reg = regularizers(cfg, in.object_velocity_prev_world, in.object_velocity_world, in.dt, in.action_prev,
                                in.action, in.yaw_rate_base1, in.yaw_rate_base2);
  b.obj_acc = reg.obj_acc;
  b.action_rate = reg.action_rate;
  b.ang_vel = reg.ang_vel;
  b.finalize();
  return b;
}

}  // namespace duocarry
