#include "duocarry/prm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "duocarry/random.hpp"

namespace duocarry {

std::string_view prmModeName(PrmMode mode) { return mode == PrmMode::Local ? "local" : "full"; }

std::string_view prmStatusName(PrmStatus s) {
  switch (s) {
    case PrmStatus::Success: return "goal";
    case PrmStatus::PlanningFailure: return "planning-failure";
    case PrmStatus::ExecutionCollision: return "execution-collision";
    case PrmStatus::BudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

void PrmConfig::validate() const {
  if (k_neighbors < 1) throw std::invalid_argument("k_neighbors must be >= 1");
  if (n_samples < k_neighbors + 1) throw std::invalid_argument("n_samples must be >= k_neighbors + 1");
  if (n_interp < 0) throw std::invalid_argument("n_interp must be non-negative");
  if (!(max_pose_step > 0.0) || !(exec_speed > 0.0) || !(exec_dt > 0.0) || !(bar_length > 0.0))
    throw std::invalid_argument("step, speed, dt and bar length must be positive");
  if (!(window_length > 0.0) || !(window_width > 0.0)) throw std::invalid_argument("window must be non-empty");
  if (yaw_weight < 0.0 || replan_budget < 1 || !(reach_radius > 0.0))
    throw std::invalid_argument("invalid planner limits");
}

Pose2 agentPose(const SystemConfiguration& c, int agent, double bar_length) {
  const double side = agent == 1 ? -0.5 : 0.5;
  return Pose2{c.object.position + c.object.yAxis() * (side * bar_length),
               wrapAngle(c.object.yaw + (agent == 1 ? c.psi1 : c.psi2))};
}

bool feasible(const SystemConfiguration& c, std::span<const BoxObstacle> boxes, double t, double bar_length,
              const Footprint& fp) {
  const Pose2 a1 = agentPose(c, 1, bar_length);
  const Pose2 a2 = agentPose(c, 2, bar_length);
  for (const auto& b : boxes) {
    if (orientedFootprintCollides(a1, fp, b, t) || orientedFootprintCollides(a2, fp, b, t)) return false;
    if (!(segmentBoxDistance(a1.position, a2.position, b, t) > 0.0)) return false;
  }
  return true;
}

bool feasible(const SystemConfiguration& c, const Terrain& terrain, double t, double bar_length,
              const Footprint& fp) {
  const double r = bar_length / 2.0 + std::hypot(fp.half_length, fp.half_width);
  const Rect box{c.object.position - Vec2{r, r}, c.object.position + Vec2{r, r}};
  const auto near = terrain.obstaclesNear(box, t);
  return feasible(c, near, t, bar_length, fp);
}

double configDistance(const SystemConfiguration& a, const SystemConfiguration& b, double yaw_weight) {
  return (b.object.position - a.object.position).norm() +
         yaw_weight * (std::abs(angleDiff(a.object.yaw, b.object.yaw)) + std::abs(angleDiff(a.psi1, b.psi1)) +
                       std::abs(angleDiff(a.psi2, b.psi2)));
}

SystemConfiguration interpolate(const SystemConfiguration& a, const SystemConfiguration& b, double s) {
  SystemConfiguration c;
  c.object.position = a.object.position + (b.object.position - a.object.position) * s;
  c.object.yaw = wrapAngle(a.object.yaw + angleDiff(a.object.yaw, b.object.yaw) * s);
  c.psi1 = wrapAngle(a.psi1 + angleDiff(a.psi1, b.psi1) * s);
  c.psi2 = wrapAngle(a.psi2 + angleDiff(a.psi2, b.psi2) * s);
  return c;
}

int interiorCount(const SystemConfiguration& a, const SystemConfiguration& b, const PrmConfig& cfg) {
  const double len = (b.object.position - a.object.position).norm();
  const int needed = static_cast<int>(std::ceil(len / cfg.max_pose_step - 1e-12)) - 1;
  return std::max(cfg.n_interp, needed);
}

std::vector<SystemConfiguration> interpolateEdge(const SystemConfiguration& a, const SystemConfiguration& b,
                                                 int interior) {
  std::vector<SystemConfiguration> out;
  out.reserve(static_cast<std::size_t>(interior) + 2);
  out.push_back(a);
  for (int i = 1; i <= interior; ++i) out.push_back(interpolate(a, b, static_cast<double>(i) / (interior + 1)));
  out.push_back(b);
  return out;
}

SamplingRegion SamplingRegion::fromRect(const Rect& r) { return {Pose2{r.center(), 0.0}, r.size() * 0.5}; }

bool SamplingRegion::contains(const Vec2& p_world) const {
  const Vec2 q = worldToFrame(p_world, frame);
  return std::abs(q.x) <= half_extents.x && std::abs(q.y) <= half_extents.y;
}

Rect SamplingRegion::boundingBox() const {
  const Vec2 ax = frame.xAxis(), ay = frame.yAxis();
  const double ex = std::abs(ax.x) * half_extents.x + std::abs(ay.x) * half_extents.y;
  const double ey = std::abs(ax.y) * half_extents.x + std::abs(ay.y) * half_extents.y;
  return {frame.position - Vec2{ex, ey}, frame.position + Vec2{ex, ey}};
}

bool insideRegion(const SystemConfiguration& c, const SamplingRegion& region, double bar_length, const Footprint& fp) {
  for (const int agent : {1, 2}) {
    const Pose2 p = agentPose(c, agent, bar_length);
    for (const double sx : {-1.0, 1.0}) {
      for (const double sy : {-1.0, 1.0}) {
        if (!region.contains(frameToWorld({sx * fp.half_length, sy * fp.half_width}, p))) return false;
      }
    }
  }
  return true;
}

namespace {

bool admissible(const SystemConfiguration& c, const Roadmap& rm, const PrmConfig& cfg) {
  return insideRegion(c, rm.workspace, cfg.bar_length, cfg.footprint) &&
         feasible(c, rm.obstacles, rm.time, cfg.bar_length, cfg.footprint);
}

bool edgeFeasible(const SystemConfiguration& a, const SystemConfiguration& b, const Roadmap& rm,
                  const PrmConfig& cfg) {
  const int interior = interiorCount(a, b, cfg);
  for (int i = 1; i <= interior; ++i) {
    if (!admissible(interpolate(a, b, static_cast<double>(i) / (interior + 1)), rm, cfg)) return false;
  }
  return admissible(b, rm, cfg) && admissible(a, rm, cfg);
}

// Indices of nodes sorted by `key`, ties by index, excluding `skip`.
template <class Key>
std::vector<int> nearest(std::size_t n, std::size_t count, int skip, Key key) {
  std::vector<std::pair<double, int>> d;
  d.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<int>(j) == skip) continue;
    d.emplace_back(key(j), static_cast<int>(j));
  }
  const std::size_t m = std::min(count, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(m), d.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(d[i].second);
  return out;
}

}  // namespace

Roadmap buildRoadmap(std::span<const BoxObstacle> obstacles, const SamplingRegion& region, const PrmConfig& cfg,
                     std::uint64_t seed, double t) {
  cfg.validate();
  Rng rng(seed);
  Roadmap rm;
  rm.obstacles.assign(obstacles.begin(), obstacles.end());
  rm.time = t;
  rm.workspace = region;
  const double pi = std::numbers::pi;
  for (int attempt = 0; attempt < cfg.max_sample_attempts && static_cast<int>(rm.nodes.size()) < cfg.n_samples;
       ++attempt) {
    SystemConfiguration c;
    const Vec2 local{rng.uniform(-region.half_extents.x, region.half_extents.x),
                     rng.uniform(-region.half_extents.y, region.half_extents.y)};
    c.object.position = frameToWorld(local, region.frame);
    c.object.yaw = rng.uniform(-pi, pi);
    c.psi1 = rng.uniform(-pi, pi);
    c.psi2 = rng.uniform(-pi, pi);
    if (admissible(c, rm, cfg)) rm.nodes.push_back(c);
  }
  if (rm.nodes.empty()) throw std::runtime_error("no feasible roadmap sample found");

  const std::size_t n = rm.nodes.size();
  rm.edges.assign(n, {});
  std::set<std::pair<int, int>> linked;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nn = nearest(n, static_cast<std::size_t>(cfg.k_neighbors), static_cast<int>(i),
                            [&](std::size_t j) { return configDistance(rm.nodes[i], rm.nodes[j], cfg.yaw_weight); });
    for (const int j : nn) {
      const auto key = std::minmax(static_cast<int>(i), j);
      if (linked.count(key)) continue;
      if (!edgeFeasible(rm.nodes[i], rm.nodes[static_cast<std::size_t>(j)], rm, cfg)) continue;
      linked.insert(key);
      const double w = configDistance(rm.nodes[i], rm.nodes[static_cast<std::size_t>(j)], cfg.yaw_weight);
      rm.edges[i].push_back({j, w});
      rm.edges[static_cast<std::size_t>(j)].push_back({static_cast<int>(i), w});
    }
  }
  return rm;
}

std::vector<SystemConfiguration> plan(const SystemConfiguration& start, const Vec2& goal, const Roadmap& roadmap,
                                      const PrmConfig& cfg) {
  if (!feasible(start, roadmap.obstacles, roadmap.time, cfg.bar_length, cfg.footprint))
    throw std::invalid_argument("start configuration is infeasible");
  const std::size_t n = roadmap.nodes.size();
  const int s_idx = static_cast<int>(n);
  const int g_idx = static_cast<int>(n) + 1;
  Adjacency graph = roadmap.edges;
  graph.resize(n + 2);
  // Goal-side configuration reached through node j keeps node j's yaws.
  std::vector<SystemConfiguration> goal_via(n + 1);
  auto goal_config = [&](const SystemConfiguration& from) {
    SystemConfiguration g = from;
    g.object.position = goal;
    return g;
  };
  auto add = [&](int a, int b, double w) {
    graph[static_cast<std::size_t>(a)].push_back({b, w});
    graph[static_cast<std::size_t>(b)].push_back({a, w});
  };
  auto node = [&](int j) -> const SystemConfiguration& {
    return j == s_idx ? start : roadmap.nodes[static_cast<std::size_t>(j)];
  };

  // Start: k nearest in the configuration metric, widening if none connects.
  const std::size_t tries = static_cast<std::size_t>(std::max(cfg.k_neighbors, cfg.start_connect_tries));
  const auto s_nn = nearest(n, tries, -1,
                            [&](std::size_t j) { return configDistance(start, roadmap.nodes[j], cfg.yaw_weight); });
  int connected = 0;
  for (std::size_t i = 0; i < s_nn.size(); ++i) {
    if (connected >= cfg.k_neighbors || (connected > 0 && i >= static_cast<std::size_t>(cfg.k_neighbors))) break;
    const int j = s_nn[i];
    if (!edgeFeasible(start, roadmap.nodes[static_cast<std::size_t>(j)], roadmap, cfg)) continue;
    add(s_idx, j, configDistance(start, roadmap.nodes[static_cast<std::size_t>(j)], cfg.yaw_weight));
    ++connected;
  }
  if (connected == 0) return {};

  // Goal: translation-only links from the k nodes (or the start) nearest in position.
  const auto g_nn = nearest(n + 1, static_cast<std::size_t>(cfg.k_neighbors), -1,
                            [&](std::size_t j) { return (node(static_cast<int>(j)).object.position - goal).norm(); });
  for (const int j : g_nn) {
    const SystemConfiguration g = goal_config(node(j));
    if (!edgeFeasible(node(j), g, roadmap, cfg)) continue;
    goal_via[static_cast<std::size_t>(j)] = g;
    add(j, g_idx, (node(j).object.position - goal).norm());
  }

  const ShortestPathTree tree = dijkstra(graph, s_idx);
  int target = -1;
  std::vector<int> nodes_path;
  if (std::isfinite(tree.distance[static_cast<std::size_t>(g_idx)])) {
    target = g_idx;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= static_cast<int>(n); ++j) {
      if (!std::isfinite(tree.distance[static_cast<std::size_t>(j)])) continue;
      const double d = (node(j).object.position - goal).norm();
      if (d < best) {
        best = d;
        target = j;
      }
    }
  }
  nodes_path = tree.pathTo(target);
  std::vector<SystemConfiguration> out;
  for (std::size_t i = 0; i < nodes_path.size(); ++i) {
    const int j = nodes_path[i];
    if (j == g_idx) {
      out.push_back(goal_via[static_cast<std::size_t>(nodes_path[i - 1])]);
    } else {
      out.push_back(node(j));
    }
  }
  return cfg.shortcut ? shortcutPath(out, roadmap, cfg) : out;
}

std::vector<SystemConfiguration> shortcutPath(const std::vector<SystemConfiguration>& path, const Roadmap& roadmap,
                                              const PrmConfig& cfg) {
  if (path.size() < 3) return path;
  std::vector<SystemConfiguration> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t next = i + 1;
    for (std::size_t j = path.size() - 1; j > i + 1; --j) {
      if (edgeFeasible(path[i], path[j], roadmap, cfg)) {
        next = j;
        break;
      }
    }
    out.push_back(path[next]);
    i = next;
  }
  return out;
}

namespace {

LogRecord configRecord(int step, double time, const SystemConfiguration& c, const SystemConfiguration& prev,
                       double dt, double bar_length) {
  LogRecord r;
  r.step = step;
  r.time = time;
  r.agent1 = agentPose(c, 1, bar_length);
  r.agent2 = agentPose(c, 2, bar_length);
  r.object = c.object;
  if (dt > 0.0) {
    const Pose2 p1 = agentPose(prev, 1, bar_length), p2 = agentPose(prev, 2, bar_length);
    r.agent1_velocity = (r.agent1.position - p1.position) / dt;
    r.agent2_velocity = (r.agent2.position - p2.position) / dt;
    r.agent1_yaw_rate = angleDiff(p1.yaw, r.agent1.yaw) / dt;
    r.agent2_yaw_rate = angleDiff(p2.yaw, r.agent2.yaw) / dt;
    r.object_velocity.linear = (c.object.position - prev.object.position) / dt;
    r.object_velocity.angular = angleDiff(prev.object.yaw, c.object.yaw) / dt;
  }
  return r;
}

}  // namespace

bool execute(const std::vector<SystemConfiguration>& plan_steps, const Terrain& terrain, const PrmConfig& cfg,
             PrmRun& run) {
  if (plan_steps.empty()) throw std::invalid_argument("cannot execute an empty plan");
  if (run.log.empty()) {
    run.executed.push_back(plan_steps.front());
    run.log.push_back(configRecord(0, run.duration, plan_steps.front(), plan_steps.front(), 0.0, cfg.bar_length));
  }
  for (std::size_t k = 1; k < plan_steps.size(); ++k) {
    const auto pts = interpolateEdge(plan_steps[k - 1], plan_steps[k], interiorCount(plan_steps[k - 1], plan_steps[k], cfg));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const SystemConfiguration& a = pts[i - 1];
      const SystemConfiguration& b = pts[i];
      double travel = (b.object.position - a.object.position).norm();
      for (int agent : {1, 2}) {
        travel = std::max(travel, (agentPose(b, agent, cfg.bar_length).position -
                                   agentPose(a, agent, cfg.bar_length).position).norm());
      }
      double dt = travel / cfg.exec_speed;
      // Pure in-place yaw changes still take time at the same angular rate.
      const double turn = std::max({std::abs(angleDiff(a.psi1, b.psi1)), std::abs(angleDiff(a.psi2, b.psi2)),
                                    std::abs(angleDiff(a.object.yaw, b.object.yaw))});
      dt = std::max(dt, turn / cfg.exec_speed);
      run.duration += dt;
      run.executed.push_back(b);
      run.log.push_back(configRecord(static_cast<int>(run.log.size()), run.duration, b, a, dt, cfg.bar_length));
      if (!feasible(b, terrain, run.duration, cfg.bar_length, cfg.footprint)) return false;
    }
  }
  return true;
}

PrmRun runPrm(const Terrain& terrain, const Pose2& start, const std::vector<Vec2>& waypoints, const PrmConfig& cfg,
              std::uint64_t seed) {
  cfg.validate();
  PrmRun run;
  SystemConfiguration current{start, 0.0, 0.0};
  if (!feasible(current, terrain, 0.0, cfg.bar_length, cfg.footprint))
    throw std::invalid_argument("start configuration is in collision");
  using Clock = std::chrono::steady_clock;
  auto finish = [&](PrmStatus s) {
    run.status = s;
    run.lengths = pathLengths(run.log);
    return run;
  };

  if (cfg.mode == PrmMode::Full) {
    const auto t0 = Clock::now();
    const Roadmap rm = buildRoadmap(terrain.obstacles(), SamplingRegion::fromRect(terrain.bounds()), cfg, seed, 0.0);
    std::vector<SystemConfiguration> full{current};
    for (const Vec2& wp : waypoints) {
      const auto leg = plan(full.back(), wp, rm, cfg);
      ++run.plans;
      if (leg.empty() || (leg.back().object.position - wp).norm() >= cfg.reach_radius) {
        run.planning_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
        return finish(PrmStatus::PlanningFailure);
      }
      full.insert(full.end(), leg.begin() + 1, leg.end());
    }
    run.planning_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    if (!execute(full, terrain, cfg, run)) return finish(PrmStatus::ExecutionCollision);
    return finish(PrmStatus::Success);
  }

  std::size_t wp = 0;
  int windows = 0;
  while (wp < waypoints.size()) {
    if ((current.object.position - waypoints[wp]).norm() < cfg.reach_radius) {
      ++wp;
      continue;
    }
    if (windows >= cfg.replan_budget) return finish(PrmStatus::BudgetExhausted);
    const std::uint64_t window_seed = deriveSeed(seed, static_cast<std::uint64_t>(windows));
    ++windows;
    const auto t0 = Clock::now();
    const SamplingRegion region{current.object, {cfg.window_length / 2.0, cfg.window_width / 2.0}};
    std::vector<BoxObstacle> known;
    for (const auto& b : terrain.obstaclesNear(region.boundingBox(), run.duration)) {
      const Vec2 c = b.centerAt(run.duration);
      const Rect fp{c - b.half_extents, c + b.half_extents};
      if (fp.intersects(region.boundingBox())) known.push_back(b);
    }
    std::vector<SystemConfiguration> leg;
    try {
      const Roadmap rm = buildRoadmap(known, region, cfg, window_seed, run.duration);
      leg = plan(current, waypoints[wp], rm, cfg);
    } catch (const std::runtime_error&) {
      leg.clear();
    }
    ++run.plans;
    run.planning_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    if (leg.size() < 2) continue;
    if (!execute(leg, terrain, cfg, run)) return finish(PrmStatus::ExecutionCollision);
    current = leg.back();
  }
  return finish(PrmStatus::Success);
}

}  // namespace duocarry
