#include "duocarry/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace duocarry {

std::vector<double> Observation::flatten() const {
  std::vector<double> v(proprio.begin(), proprio.end());
  v.insert(v.end(), extero.begin(), extero.end());
  return v;
}

std::vector<double> LocalObservation::flatten() const {
  std::vector<double> v(object_velocity.begin(), object_velocity.end());
  v.push_back(command.x);
  v.push_back(command.y);
  v.insert(v.end(), own_velocity.begin(), own_velocity.end());
  v.push_back(own_relative_yaw);
  v.insert(v.end(), map_half.begin(), map_half.end());
  return v;
}

Observation observe(const SystemState& state, const Vec2& command, const Action& last_action,
                    const HeightMap& fused_map, const PolicyMapConfig& map_cfg, double reference_height) {
  if (fused_map.rows != map_cfg.rows || fused_map.cols != map_cfg.cols ||
      fused_map.cells.size() != static_cast<std::size_t>(map_cfg.rows) * static_cast<std::size_t>(map_cfg.cols))
    throw std::invalid_argument("height map does not match the configured grid");

  Observation o;
  o.map_rows = map_cfg.rows;
  o.map_cols = map_cfg.cols;
  const Pose2& frame = state.object_pose;
  const Vec2 v_obj = vectorToFrame(state.object_velocity.linear, frame);
  const Vec2 v1 = vectorToFrame(state.agent1.velocity_world, frame);
  const Vec2 v2 = vectorToFrame(state.agent2.velocity_world, frame);
  auto& p = o.proprio;
  p[0] = v_obj.x;
  p[1] = v_obj.y;
  p[2] = state.object_velocity.angular;
  p[3] = command.x;
  p[4] = command.y;
  std::copy(last_action.begin(), last_action.end(), p.begin() + 5);
  p[11] = v1.x;
  p[12] = v1.y;
  p[13] = state.agent1.yaw_rate;
  p[14] = v2.x;
  p[15] = v2.y;
  p[16] = state.agent2.yaw_rate;
  p[17] = state.relativeYaw(1);
  p[18] = state.relativeYaw(2);

  o.extero.reserve(fused_map.cells.size());
  for (const double h : fused_map.cells) o.extero.push_back(h - reference_height);

  for (const double v : p)
    if (!std::isfinite(v)) throw std::domain_error("observation contains non-finite values");
  for (const double v : o.extero)
    if (!std::isfinite(v)) throw std::domain_error("observation contains non-finite values");
  return o;
}

Action boundAction(const Action& raw, double v_max) {
  Action out{};
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = v_max * std::tanh(raw[i] / v_max);
  return out;
}

std::pair<LocalObservation, LocalObservation> splitObservation(const Observation& obs) {
  const int rows = obs.map_rows;
  const int cols = obs.map_cols;
  const int left = cols / 2;
  LocalObservation a, b;
  for (auto* l : {&a, &b}) {
    l->object_velocity = {obs.proprio[0], obs.proprio[1], obs.proprio[2]};
    l->command = obs.command();
    l->map_rows = rows;
  }
  a.own_velocity = {obs.proprio[11], obs.proprio[12], obs.proprio[13]};
  b.own_velocity = {obs.proprio[14], obs.proprio[15], obs.proprio[16]};
  a.own_relative_yaw = obs.proprio[17];
  b.own_relative_yaw = obs.proprio[18];
  a.half_cols = left;
  b.half_cols = cols - left;
  for (int r = 0; r < rows; ++r) {
    const auto row = obs.extero.begin() + static_cast<std::ptrdiff_t>(r) * cols;
    a.map_half.insert(a.map_half.end(), row, row + left);
    b.map_half.insert(b.map_half.end(), row + left, row + cols);
  }
  return {a, b};
}

std::vector<double> rejoinMaps(const LocalObservation& agent1, const LocalObservation& agent2) {
  if (agent1.map_rows != agent2.map_rows) throw std::invalid_argument("map halves have different row counts");
  std::vector<double> out;
  out.reserve(agent1.map_half.size() + agent2.map_half.size());
  for (int r = 0; r < agent1.map_rows; ++r) {
    const auto a = agent1.map_half.begin() + static_cast<std::ptrdiff_t>(r) * agent1.half_cols;
    const auto b = agent2.map_half.begin() + static_cast<std::ptrdiff_t>(r) * agent2.half_cols;
    out.insert(out.end(), a, a + agent1.half_cols);
    out.insert(out.end(), b, b + agent2.half_cols);
  }
  return out;
}

Action heuristicTracker(const Observation& obs, const TrackerConfig& cfg) {
  const Vec2 cmd = obs.command();
  const double half = cfg.bar_length / 2.0;

  double omega = 0.0;
  if (cmd.squaredNorm() > 0.0) {
    const double theta = std::atan2(cmd.y, cmd.x);
    const double target = theta >= 0.0 ? std::numbers::pi / 2.0 : -std::numbers::pi / 2.0;
    omega = std::clamp(cfg.yaw_gain * (theta - target), -cfg.yaw_rate_max, cfg.yaw_rate_max);
  }

  // Body points along the bar with the share of their push given to agent2.
  constexpr int kBodyPoints = 5;
  std::array<Vec2, 2> push{};
  const int rows = obs.map_rows, cols = obs.map_cols;
  const double res = cfg.map.resolution;
  if (obs.extero.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (!(obs.extero[static_cast<std::size_t>(r * cols + c)] > cfg.height_threshold)) continue;
        const Vec2 q{(r - (rows - 1) / 2.0) * res, (c - (cols - 1) / 2.0) * res};
        for (int k = 0; k < kBodyPoints; ++k) {
          const double s = static_cast<double>(k) / (kBodyPoints - 1);
          const Vec2 b{0.0, -half + s * cfg.bar_length};
          const Vec2 diff = b - q;
          const double d = diff.norm();
          if (!(d < cfg.repulsion_cutoff) || !(d > 0.0)) continue;
          const Vec2 f = diff * (cfg.repulsion_gain * (cfg.repulsion_cutoff - d) / (cfg.repulsion_cutoff * d));
          push[0] += f * (1.0 - s);
          push[1] += f * s;
        }
      }
    }
  }
  for (auto& f : push) {
    const double n = f.norm();
    if (n > cfg.repulsion_max) f *= cfg.repulsion_max / n;
  }

  const Vec2 common = cmd * cfg.speed;
  // Rigid rotation about the midpoint: omega x r with r = (0, -/+ half).
  const std::array<Vec2, 2> spin{Vec2{omega * half, 0.0}, Vec2{-omega * half, 0.0}};
  const double limit = cfg.saturation * cfg.v_max;
  auto pre = [&](double desired) {
    return cfg.v_max * std::atanh(std::clamp(desired, -limit, limit) / cfg.v_max);
  };

  Action raw{};
  for (int i = 0; i < 2; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vec2 v = common + spin[ui] + push[ui];
    const double yaw_rate = omega + cfg.relative_yaw_gain * obs.relativeYaw(i + 1);
    raw[3 * ui] = pre(v.x);
    raw[3 * ui + 1] = pre(v.y);
    raw[3 * ui + 2] = pre(yaw_rate);
  }
  return raw;
}

void EpisodeConfig::validate() const {
  if (path.waypoints.empty()) throw std::invalid_argument("episode path has no waypoints");
  if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
  if (!(v_max > 0.0) || v_min != -v_max) throw std::invalid_argument("action bounds must be symmetric about zero");
  if (!(reach_radius > 0.0)) throw std::invalid_argument("reach_radius must be positive");
  if (start_jitter_position < 0.0 || start_jitter_yaw < 0.0) throw std::invalid_argument("jitter must be non-negative");
  sim.validate();
  reward.validate();
}

Environment::Environment(const Terrain& terrain, EpisodeConfig cfg)
    : terrain_(&terrain), cfg_(std::move(cfg)), sim_(terrain, cfg_.sim) {
  cfg_.validate();
}

Observation Environment::makeObservation() {
  const SystemState& s = sim_.state();
  const HeightMap m1 = maxFilter(sense(*terrain_, s.agent1.pose, s.time, cfg_.sensor));
  const HeightMap m2 = maxFilter(sense(*terrain_, s.agent2.pose, s.time, cfg_.sensor));
  HeightMap fused = fuse(m1, m2, s.object_pose, cfg_.policy_map);
  if (cfg_.augment_maps)
    fused = augment(fused, cfg_.augment, deriveSeed(deriveSeed(cfg_.seed, 2), static_cast<std::uint64_t>(steps_)));
  const double ref = cfg_.relative_heights ? terrain_->heightAt(s.object_pose.position, s.time).value_or(0.0) : 0.0;
  return observe(s, command_, last_action_, fused, cfg_.policy_map, ref);
}

Observation Environment::reset(const Pose2& start) {
  Rng rng(deriveSeed(cfg_.seed, 1));
  Pose2 p = start;
  if (cfg_.start_jitter_position > 0.0) {
    p.position.x += rng.uniform(-cfg_.start_jitter_position, cfg_.start_jitter_position);
    p.position.y += rng.uniform(-cfg_.start_jitter_position, cfg_.start_jitter_position);
  }
  if (cfg_.start_jitter_yaw > 0.0) p.yaw = wrapAngle(p.yaw + rng.uniform(-cfg_.start_jitter_yaw, cfg_.start_jitter_yaw));
  sim_.reset(p);
  path_ = cfg_.path;
  path_.next_index = 0;
  path_.updateReachedFraction();
  command_ = computeCommand(sim_.state().object_pose, path_, cfg_.reach_radius).value_or(Vec2{});
  last_action_ = {};
  steps_ = 0;
  done_ = false;
  log_.clear();
  log_.push_back(makeLogRecord(0, sim_.state(), last_action_, RewardBreakdown{}, {}));
  return makeObservation();
}

StepResult Environment::step(const Action& raw_action) {
  if (done_) throw std::logic_error("step called on a finished episode");
  StepResult res;
  res.action = boundAction(raw_action, cfg_.v_max);
  const SystemState before = sim_.state();
  const TerminationLimits limits{cfg_.max_steps * cfg_.sim.dt, cfg_.reach_radius};
  StepOutcome out = sim_.step(res.action, path_.waypoints.back(), limits);
  ++steps_;
  const SystemState& s = out.state;

  RewardInputs in;
  in.command = command_;
  in.object_velocity = vectorToFrame(s.object_velocity.linear, s.object_pose);
  in.object_velocity_prev_world = before.object_velocity.linear;
  in.object_velocity_world = s.object_velocity.linear;
  in.dt = cfg_.sim.dt;
  const double reach = cfg_.reward.delta + s.bar_length;
  const Rect near{s.object_pose.position - Vec2{reach, reach}, s.object_pose.position + Vec2{reach, reach}};
  const auto boxes = terrain_->obstaclesNear(near, s.time);
  in.d_min_obj = nearestObstacleDistance(s.object_pose.position, boxes, s.time);
  in.d_min_base1 = nearestObstacleDistance(s.agent1.pose.position, boxes, s.time);
  in.d_min_base2 = nearestObstacleDistance(s.agent2.pose.position, boxes, s.time);
  in.action = res.action;
  in.action_prev = last_action_;
  in.penetrations.assign(3, 0.0);
  for (const auto& c : out.contacts) in.penetrations[static_cast<std::size_t>(c.body)] = c.penetration;
  in.history.assign(s.history.begin(), s.history.end());
  in.yaw_rate_base1 = s.agent1.yaw_rate;
  in.yaw_rate_base2 = s.agent2.yaw_rate;
  res.reward = computeReward(cfg_.reward, in);

  if (const auto c = computeCommand(s.object_pose, path_, cfg_.reach_radius)) command_ = *c;
  if (out.terminated == Termination::Goal) {
    path_.next_index = path_.waypoints.size();
    path_.updateReachedFraction();
  }
  last_action_ = res.action;
  res.termination = out.terminated;
  res.deep_collision = out.deep_collision;
  res.contacts = out.contacts;
  done_ = out.terminated.has_value();
  log_.push_back(makeLogRecord(steps_, s, res.action, res.reward, out.contacts));
  res.observation = makeObservation();
  return res;
}

EpisodeOutcome runEpisode(const Terrain& terrain, const Pose2& start, const EpisodeConfig& cfg,
                          const Controller& controller) {
  Environment env(terrain, cfg);
  Observation obs = env.reset(start);
  EpisodeOutcome outcome;
  while (!env.done()) {
    StepResult r = env.step(controller(obs));
    const auto terms = r.reward.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) outcome.term_sums[i] += terms[i];
    outcome.total_reward += r.reward.total;
    if (r.deep_collision) ++outcome.deep_collision_steps;
    if (r.termination) outcome.termination = *r.termination;
    obs = std::move(r.observation);
  }
  outcome.steps = env.steps();
  outcome.reached_fraction = env.path().reached_fraction;
  outcome.log = env.log();
  outcome.lengths = pathLengths(outcome.log);
  return outcome;
}

EpisodeOutcome runCurriculumEpisode(const Terrain& terrain, const std::vector<PathAssignment>& paths,
                                    CurriculumState& curriculum, const EpisodeConfig& cfg,
                                    const Controller& controller, Rng& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < paths.size(); ++i)
    if (paths[i].level == curriculum.level && paths[i].waypoints.size() >= 2) candidates.push_back(i);
  std::shuffle(candidates.begin(), candidates.end(), rng.engine());

  for (const std::size_t idx : candidates) {
    const PathAssignment& path = paths[idx];
    const Vec2 dir = path.waypoints[1] - path.waypoints[0];
    // Bar along the first segment, then progressively rotated alternatives.
    const double along = std::atan2(-dir.x, dir.y);
    for (const double offset : {0.0, std::numbers::pi / 4.0, -std::numbers::pi / 4.0, std::numbers::pi / 2.0}) {
      const Pose2 start{path.waypoints[0], wrapAngle(along + offset)};
      try {
        resetSystem(terrain, start, cfg.sim);
      } catch (const std::invalid_argument&) {
        continue;
      }
      EpisodeConfig ep = cfg;
      ep.path = path;
      ep.seed = rng.next();
      ep.start_jitter_position = 0.0;
      ep.start_jitter_yaw = 0.0;
      EpisodeOutcome outcome = runEpisode(terrain, start, ep, controller);
      curriculum = updateCurriculum(curriculum, outcome.reached_fraction, rng);
      return outcome;
    }
  }
  throw std::runtime_error("no path at level " + std::to_string(curriculum.level) + " admits a collision-free start");
}

}  // namespace duocarry
