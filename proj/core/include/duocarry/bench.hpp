#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "duocarry/config.hpp"
#include "duocarry/terrain.hpp"
#include "duocarry/trajectory_log.hpp"

namespace duocarry {

enum class MethodKind { Heuristic, PrmLocal, PrmFull };

struct Method {
  MethodKind kind = MethodKind::Heuristic;
  int n_samples = 0;  ///< PRM only

  /// "heuristic", "prm-local-<N>", or "prm-full-<N>".
  std::string name() const;
  /// Throws std::invalid_argument for unknown names.
  static Method parse(std::string_view name);
};

struct TrialResult {
  std::string scenario;
  std::string method;
  std::uint64_t seed = 0;
  bool success = false;
  std::string termination;
  double l_agent1 = 0.0;
  double l_agent2 = 0.0;
  double l_obj = 0.0;
  int deep_collision_steps = 0;
  double latency = 0.0;  ///< mean wall-clock seconds per decision; not part of records
};

/// One trial: an episode for the tracker, a plan-and-execute run for the
/// planners. Success means reaching the final waypoint with no deep
/// collision. `log`, when given, receives the executed trajectory.
TrialResult runTrial(const Scenario& scenario, const Method& method, std::uint64_t seed, const AppConfig& cfg,
                     TrajectoryLog* log = nullptr);

/// Seed of trial i in a batch.
std::uint64_t trialSeed(std::uint64_t seed0, int index);

/// Runs n_trials in parallel (cfg.threads workers); results are in trial
/// order regardless of scheduling.
std::vector<TrialResult> runTrials(const Scenario& scenario, const Method& method, int n_trials, std::uint64_t seed0,
                                   const AppConfig& cfg);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation; 0 below two values
};
Summary summarize(const std::vector<double>& values);

struct ReportRow {
  std::string scenario;
  std::string method;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  Summary l_agent1;
  Summary l_agent2;
  Summary l_obj;
  double mean_latency = 0.0;
};

struct BenchReport {
  std::vector<TrialResult> records;
  std::vector<ReportRow> rows;
};

/// Groups records by (scenario, method) in first-appearance order. Length
/// statistics use successful trials only.
std::vector<ReportRow> aggregate(const std::vector<TrialResult>& records);

BenchReport runBench(const std::vector<ScenarioKind>& scenarios, const std::vector<Method>& methods, int n_trials,
                     std::uint64_t seed0, const AppConfig& cfg, bool dynamic = false);

/// Aligned text table without timing columns.
std::string reportTable(const std::vector<ReportRow>& rows);
/// Per-trial records as comma-separated text (17 significant digits).
std::string recordsToCsv(const std::vector<TrialResult>& records);
std::vector<TrialResult> recordsFromCsv(std::string_view text);
/// Wall-clock figures, kept apart so the other outputs stay reproducible.
std::string timingCsv(const BenchReport& report);

}  // namespace duocarry
