#include "duocarry/waypoint_graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "duocarry/random.hpp"

namespace duocarry {

std::vector<int> ShortestPathTree::pathTo(int target) const {
  if (target < 0 || static_cast<std::size_t>(target) >= distance.size() ||
      distance[static_cast<std::size_t>(target)] == std::numeric_limits<double>::infinity())
    return {};
  std::vector<int> path;
  for (int v = target; v != -1; v = predecessor[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

ShortestPathTree dijkstra(const Adjacency& graph, int source) {
  const std::size_t n = graph.size();
  if (source < 0 || static_cast<std::size_t>(source) >= n)
    throw std::out_of_range("dijkstra source out of range");
  ShortestPathTree tree;
  tree.distance.assign(n, std::numeric_limits<double>::infinity());
  tree.predecessor.assign(n, -1);
  std::vector<char> settled(n, 0);

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  tree.distance[static_cast<std::size_t>(source)] = 0.0;
  open.emplace(0.0, source);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (settled[ui]) continue;
    settled[ui] = 1;
    for (const auto& e : graph[ui]) {
      if (e.weight < 0.0) throw std::invalid_argument("dijkstra requires non-negative weights");
      const auto vi = static_cast<std::size_t>(e.to);
      const double nd = d + e.weight;
      if (nd < tree.distance[vi]) {
        tree.distance[vi] = nd;
        tree.predecessor[vi] = u;
        open.emplace(nd, e.to);
      }
    }
  }
  return tree;
}

std::size_t FreeSpaceGraph::edgeCount() const {
  std::size_t n = 0;
  for (const auto& adj : edges) n += adj.size();
  return n / 2;
}

FreeSpaceGraph sampleGraph(const Terrain& terrain, const Rect& region, const GraphSamplingConfig& cfg,
                           std::uint64_t seed) {
  if (cfg.n_points < 0) throw std::invalid_argument("n_points must be non-negative");
  const Rect padded{region.lo - Vec2{cfg.clearance, cfg.clearance},
                    region.hi + Vec2{cfg.clearance, cfg.clearance}};
  const std::vector<BoxObstacle> boxes = terrain.obstaclesNear(padded, 0.0);

  Rng rng(seed);
  FreeSpaceGraph g;
  g.nodes.reserve(static_cast<std::size_t>(cfg.n_points));
  const long budget = static_cast<long>(cfg.n_points) * cfg.max_attempts_per_point;
  long attempts = 0;
  while (static_cast<int>(g.nodes.size()) < cfg.n_points) {
    if (attempts++ >= budget) throw std::runtime_error("free-space sampling exhausted: too little free space");
    const Vec2 p{rng.uniform(region.lo.x, region.hi.x), rng.uniform(region.lo.y, region.hi.y)};
    if (nearestObstacleDistance(p, boxes, 0.0) >= cfg.clearance) g.nodes.push_back(p);
  }

  g.edges.assign(g.nodes.size(), {});
  const double r2 = cfg.connection_radius * cfg.connection_radius;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      const Vec2 d = g.nodes[j] - g.nodes[i];
      if (d.squaredNorm() > r2) continue;
      bool clear = true;
      for (const auto& b : boxes) {
        if (segmentBoxDistance(g.nodes[i], g.nodes[j], b, 0.0) < cfg.clearance) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      const double w = d.norm();
      g.edges[i].push_back({static_cast<int>(j), w});
      g.edges[j].push_back({static_cast<int>(i), w});
    }
  }
  return g;
}

double PathAssignment::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) total += (waypoints[i] - waypoints[i - 1]).norm();
  return total;
}

void PathAssignment::updateReachedFraction() {
  reached_fraction = waypoints.empty()
                         ? 0.0
                         : static_cast<double>(std::min(next_index, waypoints.size())) /
                               static_cast<double>(waypoints.size());
}

std::vector<PathAssignment> shortestPaths(const FreeSpaceGraph& graph, const Terrain& terrain,
                                          const PathSamplingConfig& cfg, std::uint64_t seed) {
  if (graph.nodes.empty()) throw std::invalid_argument("shortest paths need a non-empty graph");
  if (cfg.l_min > cfg.l_max) throw std::invalid_argument("l_min must not exceed l_max");
  Rng rng(seed);
  const int n = static_cast<int>(graph.nodes.size());

  std::vector<int> sources(static_cast<std::size_t>(n));
  std::iota(sources.begin(), sources.end(), 0);
  if (n > cfg.source_cap) {
    std::shuffle(sources.begin(), sources.end(), rng.engine());
    sources.resize(static_cast<std::size_t>(cfg.source_cap));
    std::sort(sources.begin(), sources.end());
  }

  // Reservoir sampling over the stream of qualifying ordered pairs gives a
  // uniform draw without materializing all of them.
  const std::size_t keep = static_cast<std::size_t>(std::max(cfg.n_keep, 0));
  std::vector<std::pair<int, int>> reservoir;
  reservoir.reserve(keep);
  std::uint64_t seen = 0;
  for (const int s : sources) {
    const ShortestPathTree tree = dijkstra(graph.edges, s);
    for (int t = 0; t < n; ++t) {
      const double d = tree.distance[static_cast<std::size_t>(t)];
      if (t == s || d < cfg.l_min || d > cfg.l_max) continue;
      ++seen;
      if (reservoir.size() < keep) {
        reservoir.emplace_back(s, t);
      } else if (keep > 0) {
        const auto j = static_cast<std::uint64_t>(rng.uniformInt(0, static_cast<std::int64_t>(seen - 1)));
        if (j < keep) reservoir[j] = {s, t};
      }
    }
  }
  std::sort(reservoir.begin(), reservoir.end());

  std::vector<PathAssignment> paths;
  paths.reserve(reservoir.size());
  int cached_source = -1;
  ShortestPathTree tree;
  for (const auto& [s, t] : reservoir) {
    if (s != cached_source) {
      tree = dijkstra(graph.edges, s);
      cached_source = s;
    }
    PathAssignment p;
    for (const int v : tree.pathTo(t)) p.waypoints.push_back(graph.nodes[static_cast<std::size_t>(v)]);
    const auto sub = terrain.subterrainAt(p.waypoints.front());
    p.level = sub ? terrain.subterrains()[*sub].level : 0;
    paths.push_back(std::move(p));
  }
  return paths;
}

std::optional<Vec2> computeCommand(const Pose2& object_pose, PathAssignment& path, double reach_radius) {
  while (path.next_index < path.waypoints.size() &&
         (path.waypoints[path.next_index] - object_pose.position).norm() < reach_radius) {
    ++path.next_index;
  }
  path.updateReachedFraction();
  if (path.completed()) return std::nullopt;
  const Vec2 d = path.waypoints[path.next_index] - object_pose.position;
  return vectorToFrame(d / d.norm(), object_pose);
}

CurriculumState updateCurriculum(CurriculumState state, double reached_fraction, Rng& rng) {
  if (reached_fraction > 0.5) {
    if (state.level + 1 > state.max_level) {
      state.level = static_cast<int>(rng.uniformInt(0, state.max_level));
    } else {
      ++state.level;
    }
  } else if (reached_fraction < 0.25) {
    state.level = std::max(state.level - 1, 0);
  }
  return state;
}

std::string pathsToJson(const std::vector<PathAssignment>& paths) {
  nlohmann::ordered_json root;
  root["format"] = "duocarry-paths";
  root["version"] = 1;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : paths) {
    nlohmann::ordered_json jp;
    jp["level"] = p.level;
    jp["length"] = p.length();
    auto wps = nlohmann::ordered_json::array();
    for (const auto& w : p.waypoints) wps.push_back({w.x, w.y});
    jp["waypoints"] = std::move(wps);
    arr.push_back(std::move(jp));
  }
  root["paths"] = std::move(arr);
  return root.dump(2) + "\n";
}

std::vector<PathAssignment> pathsFromJson(std::string_view text) {
  try {
    const auto root = nlohmann::json::parse(text);
    if (root.at("format").get<std::string>() != "duocarry-paths") throw std::runtime_error("not a path file");
    std::vector<PathAssignment> out;
    for (const auto& jp : root.at("paths")) {
      PathAssignment p;
      p.level = jp.at("level").get<int>();
      for (const auto& w : jp.at("waypoints")) p.waypoints.push_back({w.at(0).get<double>(), w.at(1).get<double>()});
      out.push_back(std::move(p));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed path file: ") + e.what());
  }
}

}  // namespace duocarry
