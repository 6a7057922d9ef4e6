#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "duocarry/random.hpp"
#include "duocarry/waypoint_graph.hpp"
#include "oracles.hpp"

using namespace duocarry;

namespace {

Adjacency randomGraph(Rng& rng, int n, double density) {
  Adjacency g(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u != v && rng.bernoulli(density))
        g[static_cast<std::size_t>(u)].push_back({v, static_cast<double>(rng.uniformInt(0, 20))});
    }
  }
  return g;
}

Terrain openTerrain(std::vector<BoxObstacle> boxes = {}) {
  Subterrain s;
  s.bounds = {Vec2{0.0, 0.0}, Vec2{12.0, 12.0}};
  s.obstacles = std::move(boxes);
  return Terrain(s.bounds, {s});
}

}  // namespace

TEST_CASE("line graph shortest path") {
  Adjacency g(3);
  g[0].push_back({1, 4.0});
  g[1].push_back({0, 4.0});
  g[1].push_back({2, 3.0});
  g[2].push_back({1, 3.0});
  const auto tree = dijkstra(g, 0);
  CHECK(tree.distance[2] == 7.0);
  CHECK(tree.pathTo(2) == std::vector<int>{0, 1, 2});
  CHECK(tree.pathTo(0) == std::vector<int>{0});
}

TEST_CASE("dijkstra matches Bellman-Ford on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.uniformInt(1, 50));
    const Adjacency g = randomGraph(rng, n, rng.uniform(0.02, 0.3));
    const int src = static_cast<int>(rng.uniformInt(0, n - 1));
    const auto tree = dijkstra(g, src);
    const auto ref = oracle::bellmanFord(g, src);
    for (int v = 0; v < n; ++v) CHECK(tree.distance[static_cast<std::size_t>(v)] == ref[static_cast<std::size_t>(v)]);
  }
}

TEST_CASE("dijkstra breaks ties towards lower node indices") {
  // Two equal routes 0-1-3 and 0-2-3.
  Adjacency g(4);
  g[0] = {{2, 1.0}, {1, 1.0}};
  g[1] = {{3, 1.0}};
  g[2] = {{3, 1.0}};
  const auto tree = dijkstra(g, 0);
  CHECK(tree.pathTo(3) == std::vector<int>{0, 1, 3});
  CHECK(tree.pathTo(3) == dijkstra(g, 0).pathTo(3));
}

TEST_CASE("dijkstra rejects negative weights and bad sources") {
  Adjacency g(2);
  g[0].push_back({1, -1.0});
  CHECK_THROWS_AS(dijkstra(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(dijkstra(g, 5), std::out_of_range);
}

TEST_CASE("free-space graph on an empty subterrain is connected") {
  const Terrain t = openTerrain();
  GraphSamplingConfig cfg;
  const FreeSpaceGraph g = sampleGraph(t, t.bounds(), cfg, 1);
  REQUIRE(g.nodes.size() == 2000);
  const auto tree = dijkstra(g.edges, 0);
  for (double d : tree.distance) CHECK(std::isfinite(d));
  for (std::size_t u = 0; u < g.edges.size(); ++u) {
    for (const auto& e : g.edges[u]) {
      CHECK(e.weight == doctest::Approx((g.nodes[u] - g.nodes[static_cast<std::size_t>(e.to)]).norm()));
      CHECK(e.weight <= cfg.connection_radius);
    }
  }
}

TEST_CASE("two nodes and no obstacles give one edge of Euclidean length") {
  const Terrain t = openTerrain();
  GraphSamplingConfig cfg;
  cfg.n_points = 2;
  cfg.connection_radius = 100.0;
  const FreeSpaceGraph g = sampleGraph(t, t.bounds(), cfg, 4);
  CHECK(g.edgeCount() == 1);
  CHECK(g.edges[0][0].weight == doctest::Approx((g.nodes[0] - g.nodes[1]).norm()));
}

TEST_CASE("nodes and edges keep the clearance") {
  BoxObstacle b;
  b.center = {6.0, 6.0};
  b.half_extents = {0.75, 0.75};
  const Terrain t = openTerrain({b});
  GraphSamplingConfig cfg;
  cfg.n_points = 600;
  const FreeSpaceGraph g = sampleGraph(t, t.bounds(), cfg, 9);
  for (const auto& p : g.nodes) CHECK(pointBoxDistance(p, b) >= 0.75);
  for (std::size_t u = 0; u < g.edges.size(); ++u) {
    for (const auto& e : g.edges[u]) {
      const Vec2 a = g.nodes[u], c = g.nodes[static_cast<std::size_t>(e.to)];
      CHECK(oracle::segmentBox(a, c, oracle::boxAt(b, 0.0)) >= 0.75 - 1e-9);
    }
  }

  // A point 0.5 m from the box face lies inside the 0.75 m clearance band.
  CHECK(pointBoxDistance({6.0 + 0.75 + 0.5, 6.0}, b) == doctest::Approx(0.5));
  GraphSamplingConfig tight = cfg;
  tight.n_points = 1;
  const Rect sliver{Vec2{7.25, 5.9}, Vec2{7.25, 6.1}};
  CHECK_THROWS_AS(sampleGraph(t, sliver, tight, 1), std::runtime_error);
}

TEST_CASE("sampled paths respect the length window") {
  const Terrain t = openTerrain();
  GraphSamplingConfig gcfg;
  gcfg.n_points = 400;
  const FreeSpaceGraph g = sampleGraph(t, t.bounds(), gcfg, 3);
  PathSamplingConfig pcfg;
  pcfg.n_keep = 300;
  const auto paths = shortestPaths(g, t, pcfg, 8);
  CHECK(paths.size() == 300);
  for (const auto& p : paths) {
    CHECK(p.length() >= 5.0 - 1e-9);
    CHECK(p.length() <= 12.0 + 1e-9);
    CHECK(p.level == 0);
  }
  CHECK(pathsToJson(paths) == pathsToJson(shortestPaths(g, t, pcfg, 8)));

  // Each path is a graph-shortest path between its endpoints.
  for (std::size_t k = 0; k < 10; ++k) {
    const auto& p = paths[k];
    int s = -1, e = -1;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (g.nodes[i] == p.waypoints.front()) s = static_cast<int>(i);
      if (g.nodes[i] == p.waypoints.back()) e = static_cast<int>(i);
    }
    REQUIRE(s >= 0);
    REQUIRE(e >= 0);
    CHECK(p.length() == doctest::Approx(oracle::bellmanFord(g.edges, s)[static_cast<std::size_t>(e)]));
  }

  PathSamplingConfig greedy = pcfg;
  greedy.n_keep = 1000000;
  const auto all = shortestPaths(g, t, greedy, 8);
  CHECK(all.size() < 1000000);
  CHECK(all.size() > paths.size());
}

TEST_CASE("paths file round trip") {
  PathAssignment p;
  p.waypoints = {{0.1, 0.2}, {1.0 / 3.0, 2.0}, {5.0, -1.0}};
  p.level = 7;
  const std::string text = pathsToJson({p});
  const auto back = pathsFromJson(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].level == 7);
  CHECK(back[0].waypoints == p.waypoints);
  CHECK_THROWS(pathsFromJson("[1, 2]"));
}

TEST_CASE("command toward the next waypoint") {
  PathAssignment p;
  p.waypoints = {{3.0, 0.0}};
  auto c = computeCommand(Pose2{{0.0, 0.0}, 0.0}, p);
  REQUIRE(c);
  CHECK(c->x == doctest::Approx(1.0));
  CHECK(c->y == doctest::Approx(0.0));

  p.waypoints = {{0.0, 4.0}};
  c = computeCommand(Pose2{{0.0, 0.0}, std::numbers::pi / 2.0}, p);
  REQUIRE(c);
  CHECK(c->x == doctest::Approx(1.0));
  CHECK(c->y == doctest::Approx(0.0).epsilon(1e-12));

  p.waypoints = {{0.4, 0.0}, {0.0, 5.0}};
  p.next_index = 0;
  c = computeCommand(Pose2{{0.0, 0.0}, 0.0}, p);
  CHECK(p.next_index == 1);
  REQUIRE(c);
  CHECK(c->y == doctest::Approx(1.0));
  CHECK(p.reached_fraction == doctest::Approx(0.5));

  p.waypoints = {{0.1, 0.0}};
  p.next_index = 0;
  CHECK_FALSE(computeCommand(Pose2{{0.0, 0.0}, 0.0}, p).has_value());
  CHECK(p.completed());
  CHECK(p.reached_fraction == 1.0);
}

TEST_CASE("command has unit norm") {
  Rng rng(77);
  for (int i = 0; i < 5000; ++i) {
    PathAssignment p;
    p.waypoints = {{rng.uniform(-10, 10), rng.uniform(-10, 10)}};
    const Pose2 pose{{rng.uniform(-10, 10), rng.uniform(-10, 10)}, rng.uniform(-3.14, 3.14)};
    const auto c = computeCommand(pose, p);
    if (!c) continue;
    CHECK(std::abs(c->norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("curriculum promotion, demotion and dead zone") {
  Rng rng(1);
  const CurriculumState s{3, 49};
  CHECK(updateCurriculum(s, 0.6, rng).level == 4);
  CHECK(updateCurriculum(s, 0.2, rng).level == 2);
  CHECK(updateCurriculum(s, 0.3, rng).level == 3);
  CHECK(updateCurriculum(s, 0.5, rng).level == 3);
  CHECK(updateCurriculum(s, 0.25, rng).level == 3);
  CHECK(updateCurriculum({0, 49}, 0.0, rng).level == 0);
  for (int i = 0; i < 1000; ++i) {
    const int lvl = updateCurriculum({49, 49}, 1.0, rng).level;
    CHECK(lvl >= 0);
    CHECK(lvl <= 49);
  }
}
