#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duocarry/geometry.hpp"
#include "duocarry/terrain.hpp"

namespace duocarry {

class Rng;

struct WeightedEdge {
  int to = 0;
  double weight = 0.0;
};

using Adjacency = std::vector<std::vector<WeightedEdge>>;

struct ShortestPathTree {
  std::vector<double> distance;  ///< +inf for unreachable nodes
  std::vector<int> predecessor;  ///< -1 for the source and unreachable nodes

  /// Node sequence source..target; empty when unreachable.
  std::vector<int> pathTo(int target) const;
};

/// Single-source Dijkstra with non-negative weights. Equal-distance entries
/// pop in ascending node index, and a node's predecessor only changes on a
/// strict improvement, so the tree is deterministic.
ShortestPathTree dijkstra(const Adjacency& graph, int source);

struct FreeSpaceGraph {
  std::vector<Vec2> nodes;
  Adjacency edges;

  std::size_t edgeCount() const;
};

struct GraphSamplingConfig {
  int n_points = 2000;
  double clearance = 0.75;          ///< minimum obstacle distance of nodes and edges
  double connection_radius = 1.5;
  int max_attempts_per_point = 100;
};

/// Rejection-samples free-space nodes inside `region` (static obstacles at
/// t = 0) and connects every pair within the connection radius whose segment
/// keeps the clearance. Throws std::runtime_error when sampling is exhausted.
FreeSpaceGraph sampleGraph(const Terrain& terrain, const Rect& region, const GraphSamplingConfig& cfg,
                           std::uint64_t seed);

struct PathAssignment {
  std::vector<Vec2> waypoints;
  int level = 0;
  std::size_t next_index = 0;
  double reached_fraction = 0.0;

  double length() const;
  bool completed() const { return next_index >= waypoints.size(); }
  /// Recomputes reached_fraction from next_index.
  void updateReachedFraction();
};

struct PathSamplingConfig {
  double l_min = 5.0;
  double l_max = 12.0;
  int n_keep = 1500;
  /// All nodes act as Dijkstra sources up to this graph size; larger graphs
  /// draw this many sources at random.
  int source_cap = 5000;
};

/// Runs Dijkstra from the source nodes, collects every ordered pair whose
/// shortest-path length lies in [l_min, l_max], and keeps up to n_keep of
/// them drawn uniformly without replacement. Fewer paths are returned when
/// not enough pairs qualify.
std::vector<PathAssignment> shortestPaths(const FreeSpaceGraph& graph, const Terrain& terrain,
                                          const PathSamplingConfig& cfg, std::uint64_t seed);

/// Advances past every waypoint within `reach_radius` of the object, then
/// returns the unit direction to the next waypoint in the object frame.
/// nullopt once the path is completed.
std::optional<Vec2> computeCommand(const Pose2& object_pose, PathAssignment& path,
                                   double reach_radius = 0.5);

struct CurriculumState {
  int level = 0;
  int max_level = 49;
};

/// Promotes above half the path, demotes below a quarter (floored at 0).
/// A promotion past the top level lands on a uniformly random level.
CurriculumState updateCurriculum(CurriculumState state, double reached_fraction, Rng& rng);

std::string pathsToJson(const std::vector<PathAssignment>& paths);
std::vector<PathAssignment> pathsFromJson(std::string_view text);

}  // namespace duocarry
