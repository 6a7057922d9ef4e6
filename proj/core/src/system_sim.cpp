#include "duocarry/system_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duocarry {

std::string_view terminationName(Termination t) {
  switch (t) {
    case Termination::Goal: return "goal";
    case Termination::Timeout: return "timeout";
    case Termination::TiltProxy: return "tilt-proxy";
    case Termination::HeightProxy: return "height-proxy";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (!(bar_length > 0.0)) throw std::invalid_argument("bar_length must be positive");
  if (!(dt > 0.0) || !(substep > 0.0)) throw std::invalid_argument("dt and substep must be positive");
  if (tau_v < 0.0) throw std::invalid_argument("tau_v must be non-negative");
  if (!(v_max > 0.0) || !(omega_max > 0.0)) throw std::invalid_argument("velocity limits must be positive");
  if (!(footprint.half_length > 0.0 && footprint.half_width > 0.0))
    throw std::invalid_argument("footprint dimensions must be positive");
  if (stand_window < 1) throw std::invalid_argument("stand_window must be >= 1");
}

Pose2 objectFrame(const Vec2& p1, const Vec2& p2) {
  const Vec2 d = p2 - p1;
  // y-axis along d, so x-axis = d rotated by -90 degrees.
  return Pose2{(p1 + p2) * 0.5, std::atan2(-d.x, d.y)};
}

ObjectKinematics objectKinematics(const AgentState& a1, const AgentState& a2, OmegaFormula formula) {
  const Vec2 d = a2.pose.position - a1.pose.position;
  const double len = d.norm();
  if (!(len > 0.0)) throw std::domain_error("agents are co-located; the object frame is undefined");
  ObjectKinematics k;
  k.position = (a1.pose.position + a2.pose.position) * 0.5;
  k.velocity = (a1.velocity_world + a2.velocity_world) * 0.5;
  const Vec2 dv = a2.velocity_world - a1.velocity_world;
  if (formula == OmegaFormula::RigidBody) {
    k.yaw_rate = dv.dot((d / len).perp()) / len;
  } else {
    const double rn = k.position.norm();
    if (!(rn > 0.0)) throw std::domain_error("printed yaw-rate form is undefined at the world origin");
    k.yaw_rate = dv.dot(k.position.perp() / rn) / rn;
  }
  return k;
}

double SystemState::relativeYaw(int agent) const {
  const AgentState& a = agent == 1 ? agent1 : agent2;
  return wrapAngle(object_pose.yaw - a.pose.yaw);
}

namespace {

void refreshObject(SystemState& s) {
  s.object_pose = objectFrame(s.agent1.pose.position, s.agent2.pose.position);
  const auto k = objectKinematics(s.agent1, s.agent2);
  s.object_velocity = Twist2{k.velocity, k.yaw_rate};
}

Rect systemExtent(const SystemState& s, const SimConfig& cfg) {
  const double r = std::hypot(cfg.footprint.half_length, cfg.footprint.half_width);
  const Vec2 p1 = s.agent1.pose.position, p2 = s.agent2.pose.position;
  return {Vec2{std::min(p1.x, p2.x) - r, std::min(p1.y, p2.y) - r},
          Vec2{std::max(p1.x, p2.x) + r, std::max(p1.y, p2.y) + r}};
}

}  // namespace

std::vector<Contact> gatherContacts(const SystemState& state, const Terrain& terrain, const SimConfig& cfg) {
  std::array<double, 3> depth{};
  const double t = state.time;
  for (const auto& b : terrain.obstaclesNear(systemExtent(state, cfg), t)) {
    depth[0] = std::max(depth[0], -footprintBoxSeparation(state.agent1.pose, cfg.footprint, b, t));
    depth[1] = std::max(depth[1], -footprintBoxSeparation(state.agent2.pose, cfg.footprint, b, t));
    depth[2] = std::max(depth[2], -segmentBoxDistance(state.agent1.pose.position, state.agent2.pose.position, b, t));
  }
  std::vector<Contact> out;
  for (int i = 0; i < 3; ++i) {
    if (depth[static_cast<std::size_t>(i)] > 0.0) out.push_back({static_cast<Body>(i), depth[static_cast<std::size_t>(i)]});
  }
  return out;
}

SystemState resetSystem(const Terrain& terrain, const Pose2& start, const SimConfig& cfg, double yaw_offset1,
                        double yaw_offset2) {
  cfg.validate();
  SystemState s;
  s.bar_length = cfg.bar_length;
  const Vec2 y_axis = start.yAxis();
  s.agent1.pose = Pose2{start.position - y_axis * (cfg.bar_length * 0.5), wrapAngle(start.yaw + yaw_offset1)};
  s.agent2.pose = Pose2{start.position + y_axis * (cfg.bar_length * 0.5), wrapAngle(start.yaw + yaw_offset2)};
  refreshObject(s);
  s.object_pose.yaw = wrapAngle(start.yaw);
  s.history.assign(static_cast<std::size_t>(cfg.stand_window) + 1, s.object_pose.position);
  if (!gatherContacts(s, terrain, cfg).empty()) throw std::invalid_argument("start configuration is in collision");
  return s;
}

Simulator::Simulator(const Terrain& terrain, SimConfig cfg) : terrain_(&terrain), cfg_(cfg) { cfg_.validate(); }

void Simulator::reset(const Pose2& start, double yaw_offset1, double yaw_offset2) {
  state_ = resetSystem(*terrain_, start, cfg_, yaw_offset1, yaw_offset2);
  deep_time_ = {};
  total_clamped_ = 0;
}

StepOutcome Simulator::step(const Action& action, const std::optional<Vec2>& goal, const TerminationLimits& limits) {
  StepOutcome out;
  Action a = action;
  for (auto& v : a) {
    if (!std::isfinite(v)) throw std::invalid_argument("action contains non-finite values");
    if (v > cfg_.v_max || v < -cfg_.v_max) {
      v = std::clamp(v, -cfg_.v_max, cfg_.v_max);
      ++out.clamped_components;
    }
  }
  total_clamped_ += out.clamped_components;

  const int n = std::max(1, static_cast<int>(std::lround(cfg_.dt / cfg_.substep)));
  const double h = cfg_.dt / n;
  const double alpha = cfg_.tau_v > 0.0 ? 1.0 - std::exp(-h / cfg_.tau_v) : 1.0;
  SystemState& s = state_;
  for (int k = 0; k < n; ++k) {
    const Pose2 frame = objectFrame(s.agent1.pose.position, s.agent2.pose.position);
    for (int i = 0; i < 2; ++i) {
      AgentState& ag = i == 0 ? s.agent1 : s.agent2;
      const auto base = static_cast<std::size_t>(3 * i);
      const Vec2 cmd_obj{a[base], a[base + 1]};
      const double cmd_w = a[base + 2];
      const Vec2 target = vectorToWorld(cmd_obj, frame);
      ag.commanded_base = Twist2{vectorToFrame(target, ag.pose), cmd_w};
      ag.velocity_world += (target - ag.velocity_world) * alpha;
      ag.yaw_rate += (cmd_w - ag.yaw_rate) * alpha;
      const double speed = ag.velocity_world.norm();
      if (speed > cfg_.v_max) ag.velocity_world *= cfg_.v_max / speed;
      ag.yaw_rate = std::clamp(ag.yaw_rate, -cfg_.omega_max, cfg_.omega_max);
      ag.pose.position += ag.velocity_world * h;
      ag.pose.yaw = wrapAngle(ag.pose.yaw + ag.yaw_rate * h);
    }
    // Symmetric projection back onto the bar constraint keeps the midpoint.
    const Vec2 d = s.agent2.pose.position - s.agent1.pose.position;
    const double len = d.norm();
    if (!(len > 0.0)) throw std::domain_error("agents collapsed onto each other");
    const Vec2 corr = d * ((len - s.bar_length) / (2.0 * len));
    s.agent1.pose.position += corr;
    s.agent2.pose.position -= corr;
  }
  s.time += cfg_.dt;
  refreshObject(s);
  s.history.push_back(s.object_pose.position);
  while (s.history.size() > static_cast<std::size_t>(cfg_.stand_window) + 1) s.history.pop_front();

  out.contacts = gatherContacts(s, *terrain_, cfg_);
  std::array<bool, 3> deep{};
  for (const auto& c : out.contacts) {
    if (c.penetration > cfg_.deep_penetration) deep[static_cast<std::size_t>(c.body)] = true;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    deep_time_[i] = deep[i] ? deep_time_[i] + cfg_.dt : 0.0;
    out.deep_collision = out.deep_collision || deep[i];
  }
  out.terminated = checkTermination(s, goal, deep_time_, cfg_, limits);
  out.state = s;
  return out;
}

std::optional<Termination> checkTermination(const SystemState& state, const std::optional<Vec2>& goal,
                                            const std::array<double, 3>& deep_time, const SimConfig& cfg,
                                            const TerminationLimits& limits) {
  constexpr double kEps = 1e-9;
  if (goal && (state.object_pose.position - *goal).norm() < limits.reach_radius) return Termination::Goal;
  if (deep_time[0] >= cfg.deep_duration - kEps || deep_time[1] >= cfg.deep_duration - kEps)
    return Termination::TiltProxy;
  if (deep_time[2] >= cfg.deep_duration - kEps) return Termination::HeightProxy;
  if (state.time >= limits.max_time - kEps) return Termination::Timeout;
  return std::nullopt;
}

}  // namespace duocarry
