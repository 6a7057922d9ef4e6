#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "duocarry/bench.hpp"
#include "duocarry/config.hpp"
#include "duocarry/env.hpp"
#include "duocarry/prm.hpp"
#include "duocarry/protocol.hpp"
#include "duocarry/terrain.hpp"
#include "duocarry/trajectory_log.hpp"
#include "duocarry/waypoint_graph.hpp"

namespace fs = std::filesystem;
using namespace duocarry;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

AppConfig configFrom(const std::string& path) { return path.empty() ? AppConfig{} : loadConfig(path); }

std::vector<ScenarioKind> parseScenarios(const std::vector<std::string>& names) {
  std::vector<ScenarioKind> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.insert(out.end(), {ScenarioKind::Empty, ScenarioKind::Corridor, ScenarioKind::Boxes});
    } else {
      out.push_back(parseScenario(n));
    }
  }
  return out;
}

// Paths of one curriculum level, or of every level.
std::vector<PathAssignment> samplePaths(const Terrain& terrain, const AppConfig& cfg, std::uint64_t seed,
                                        int only_level) {
  std::vector<PathAssignment> all;
  for (const auto& sub : terrain.subterrains()) {
    if (only_level >= 0 && sub.level != only_level) continue;
    const auto stream = static_cast<std::uint64_t>(sub.level);
    const FreeSpaceGraph g = sampleGraph(terrain, sub.bounds, cfg.graph, deriveSeed(seed, 2 * stream));
    auto paths = shortestPaths(g, terrain, cfg.paths, deriveSeed(seed, 2 * stream + 1));
    if (static_cast<int>(paths.size()) < cfg.paths.n_keep)
      std::cerr << "warning: level " << sub.level << " yields " << paths.size() << " of " << cfg.paths.n_keep
                << " requested paths\n";
    all.insert(all.end(), paths.begin(), paths.end());
  }
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for two-agent cooperative carrying"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;

  auto* gen = app.add_subcommand("gen-terrain", "Generate the curriculum terrain");
  gen->add_option("--seed", seed, "Terrain seed")->required();
  gen->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  gen->add_option("--out", out_path, "Output terrain file ('-' for stdout)")->required();

  std::string terrain_path;
  int level = -1;
  auto* sample = app.add_subcommand("sample-paths", "Sample free-space graphs and shortest paths per level");
  sample->add_option("--terrain", terrain_path, "Terrain file")->required()->check(CLI::ExistingFile);
  sample->add_option("--seed", seed, "Sampling seed")->required();
  sample->add_option("--level", level, "Only this curriculum level (default: all)");
  sample->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  sample->add_option("--out", out_path, "Output paths file ('-' for stdout)")->required();

  std::string scenario_name = "empty", method_name = "heuristic", paths_path;
  int path_index = 0;
  bool dynamic = false;
  auto* rollout = app.add_subcommand("rollout", "Run one trial and write its trajectory log");
  rollout->add_option("--scenario", scenario_name, "empty | corridor | boxes");
  rollout->add_option("--method", method_name, "heuristic | prm-local-N | prm-full-N");
  rollout->add_option("--seed", seed, "Trial seed")->required();
  rollout->add_flag("--dynamic", dynamic, "Moving third box (boxes only)");
  rollout->add_option("--terrain", terrain_path, "Curriculum terrain instead of a scenario")->check(CLI::ExistingFile);
  rollout->add_option("--paths", paths_path, "Paths file used with --terrain")->check(CLI::ExistingFile);
  rollout->add_option("--path-index", path_index, "Path to follow with --terrain");
  rollout->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  rollout->add_option("--out", out_path, "Trajectory log ('-' for stdout)")->required();

  std::vector<std::string> scenarios{"all"};
  std::vector<std::string> methods{"heuristic", "prm-local-100", "prm-local-1500", "prm-full-1500"};
  int trials = 10;
  int threads = -1;
  auto* bench = app.add_subcommand("bench", "Run seeded trial batches and write a report");
  bench->add_option("--scenario", scenarios, "Scenarios (repeatable, or 'all')");
  bench->add_option("--method", methods, "Methods (repeatable)");
  bench->add_option("--trials", trials, "Trials per scenario and method")->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", seed, "Base seed")->required();
  bench->add_flag("--dynamic", dynamic, "Moving third box in the boxes scenario");
  bench->add_option("--threads", threads, "Worker threads (default from config)");
  bench->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  bench->add_option("--out", out_path, "Output directory")->required();

  std::string in_path;
  auto* exporter = app.add_subcommand("export-traj", "Convert a trajectory log into per-frame paths");
  exporter->add_option("--in", in_path, "Trajectory log")->required()->check(CLI::ExistingFile);
  exporter->add_option("--out", out_path, "Output file ('-' for stdout)")->required();

  auto* serve_cmd = app.add_subcommand("serve", "Step/reset protocol over stdin/stdout");
  serve_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  bool schema = false;
  auto* config_cmd = app.add_subcommand("config", "Print the default config or its schema");
  config_cmd->add_flag("--schema", schema, "Print the JSON schema instead");
  config_cmd->add_option("--out", out_path, "Output file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      AppConfig cfg = configFrom(config_path);
      cfg.terrain.rng_seed = seed;
      writeOutput(out_path, terrainToJson(generateTerrain(cfg.terrain)));
    } else if (*sample) {
      const AppConfig cfg = configFrom(config_path);
      const Terrain terrain = terrainFromJson(readFile(terrain_path));
      writeOutput(out_path, pathsToJson(samplePaths(terrain, cfg, seed, level)));
    } else if (*rollout) {
      const AppConfig cfg = configFrom(config_path);
      const Method method = Method::parse(method_name);
      TrajectoryLog log;
      TrialResult r;
      if (!terrain_path.empty()) {
        if (paths_path.empty()) throw std::invalid_argument("--terrain needs --paths");
        Scenario sc;
        sc.terrain = terrainFromJson(readFile(terrain_path));
        const auto paths = pathsFromJson(readFile(paths_path));
        if (path_index < 0 || static_cast<std::size_t>(path_index) >= paths.size())
          throw std::invalid_argument("--path-index out of range");
        const auto& wps = paths[static_cast<std::size_t>(path_index)].waypoints;
        if (wps.size() < 2) throw std::invalid_argument("selected path has fewer than two waypoints");
        const Vec2 d = wps[1] - wps[0];
        sc.start = Pose2{wps[0], std::atan2(-d.x, d.y)};
        sc.waypoints.assign(wps.begin() + 1, wps.end());
        r = runTrial(sc, method, seed, cfg, &log);
        r.scenario = "terrain-path-" + std::to_string(path_index);
      } else {
        const Scenario sc = makeScenario(parseScenario(scenario_name), dynamic);
        r = runTrial(sc, method, seed, cfg, &log);
      }
      writeOutput(out_path, trajectoryToCsv(log));
      std::cerr << r.scenario << ' ' << r.method << " seed " << r.seed << ": " << r.termination
                << (r.success ? " (success)" : " (failure)") << ", L_obj " << r.l_obj << " m\n";
    } else if (*bench) {
      AppConfig cfg = configFrom(config_path);
      if (threads >= 0) cfg.threads = threads;
      std::vector<Method> ms;
      for (const auto& m : methods) ms.push_back(Method::parse(m));
      const BenchReport report = runBench(parseScenarios(scenarios), ms, trials, seed, cfg, dynamic);
      const fs::path dir(out_path);
      fs::create_directories(dir);
      writeOutput((dir / "report.txt").string(), reportTable(report.rows));
      writeOutput((dir / "records.csv").string(), recordsToCsv(report.records));
      writeOutput((dir / "timing.csv").string(), timingCsv(report));
      std::cout << reportTable(report.rows);
    } else if (*exporter) {
      writeOutput(out_path, exportFramePaths(trajectoryFromCsv(readFile(in_path))));
    } else if (*serve_cmd) {
      serve(std::cin, std::cout, configFrom(config_path));
    } else if (*config_cmd) {
      writeOutput(out_path, schema ? configSchemaJson() : configToJson(AppConfig{}));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
