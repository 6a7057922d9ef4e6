#include "duocarry/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "duocarry/env.hpp"
#include "duocarry/prm.hpp"
#include "duocarry/random.hpp"

namespace duocarry {

std::string Method::name() const {
  switch (kind) {
    case MethodKind::Heuristic: return "heuristic";
    case MethodKind::PrmLocal: return "prm-local-" + std::to_string(n_samples);
    case MethodKind::PrmFull: return "prm-full-" + std::to_string(n_samples);
  }
  return "unknown";
}

Method Method::parse(std::string_view name) {
  if (name == "heuristic") return {MethodKind::Heuristic, 0};
  for (const auto& [prefix, kind] : {std::pair{std::string_view("prm-local-"), MethodKind::PrmLocal},
                                     std::pair{std::string_view("prm-full-"), MethodKind::PrmFull}}) {
    if (name.substr(0, prefix.size()) != prefix) continue;
    const std::string_view num = name.substr(prefix.size());
    int n = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
    if (ec != std::errc{} || ptr != num.data() + num.size() || n <= 0 || num.empty())
      throw std::invalid_argument("bad sample count in method '" + std::string(name) + "'");
    return {kind, n};
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

namespace {

std::string scenarioLabel(const Scenario& sc) {
  return std::string(scenarioName(sc.kind)) + (sc.dynamic ? "-dynamic" : "");
}

}  // namespace

std::uint64_t trialSeed(std::uint64_t seed0, int index) {
  return deriveSeed(seed0, static_cast<std::uint64_t>(index));
}

TrialResult runTrial(const Scenario& scenario, const Method& method, std::uint64_t seed, const AppConfig& cfg,
                     TrajectoryLog* log) {
  using Clock = std::chrono::steady_clock;
  TrialResult r;
  r.scenario = scenarioLabel(scenario);
  r.method = method.name();
  r.seed = seed;

  if (method.kind == MethodKind::Heuristic) {
    const EpisodeConfig ep = episodeConfig(cfg, scenario.waypoints, seed);
    double busy = 0.0;
    long calls = 0;
    const TrackerConfig tracker = cfg.tracker;
    const Controller controller = [&](const Observation& obs) {
      const auto t0 = Clock::now();
      Action a = heuristicTracker(obs, tracker);
      busy += std::chrono::duration<double>(Clock::now() - t0).count();
      ++calls;
      return a;
    };
    EpisodeOutcome out = runEpisode(scenario.terrain, scenario.start, ep, controller);
    r.termination = std::string(terminationName(out.termination));
    r.deep_collision_steps = out.deep_collision_steps;
    r.success = out.termination == Termination::Goal && out.deep_collision_steps == 0;
    r.l_agent1 = out.lengths.agent1;
    r.l_agent2 = out.lengths.agent2;
    r.l_obj = out.lengths.object;
    r.latency = calls ? busy / static_cast<double>(calls) : 0.0;
    if (log) *log = std::move(out.log);
    return r;
  }

  PrmConfig pc = cfg.prm;
  pc.mode = method.kind == MethodKind::PrmLocal ? PrmMode::Local : PrmMode::Full;
  pc.n_samples = method.n_samples;
  PrmRun run = runPrm(scenario.terrain, scenario.start, scenario.waypoints, pc, seed);
  r.termination = std::string(prmStatusName(run.status));
  r.success = run.status == PrmStatus::Success;
  r.l_agent1 = run.lengths.agent1;
  r.l_agent2 = run.lengths.agent2;
  r.l_obj = run.lengths.object;
  r.latency = run.plans ? run.planning_seconds / run.plans : 0.0;
  if (log) *log = std::move(run.log);
  return r;
}

std::vector<TrialResult> runTrials(const Scenario& scenario, const Method& method, int n_trials, std::uint64_t seed0,
                                   const AppConfig& cfg) {
  if (n_trials <= 0) return {};
  std::vector<TrialResult> results(static_cast<std::size_t>(n_trials));
  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(n_trials));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (int i = next++; i < n_trials; i = next++)
        results[static_cast<std::size_t>(i)] = runTrial(scenario, method, trialSeed(seed0, i), cfg);
    } catch (...) {
      errors[w] = std::current_exception();
      next = n_trials;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<ReportRow> aggregate(const std::vector<TrialResult>& records) {
  std::vector<ReportRow> rows;
  std::vector<std::vector<const TrialResult*>> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& r : records) {
    const auto key = std::pair{r.scenario, r.method};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      ReportRow row;
      row.scenario = r.scenario;
      row.method = r.method;
      rows.push_back(row);
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < rows.size(); ++g) {
    ReportRow& row = rows[g];
    std::vector<double> l1, l2, lo;
    double latency = 0.0;
    for (const TrialResult* r : groups[g]) {
      ++row.trials;
      latency += r->latency;
      if (!r->success) continue;
      ++row.successes;
      l1.push_back(r->l_agent1);
      l2.push_back(r->l_agent2);
      lo.push_back(r->l_obj);
    }
    row.success_rate = row.trials ? static_cast<double>(row.successes) / row.trials : 0.0;
    row.l_agent1 = summarize(l1);
    row.l_agent2 = summarize(l2);
    row.l_obj = summarize(lo);
    row.mean_latency = row.trials ? latency / row.trials : 0.0;
  }
  return rows;
}

BenchReport runBench(const std::vector<ScenarioKind>& scenarios, const std::vector<Method>& methods, int n_trials,
                     std::uint64_t seed0, const AppConfig& cfg, bool dynamic) {
  BenchReport report;
  for (const ScenarioKind kind : scenarios) {
    const Scenario sc = makeScenario(kind, dynamic && kind == ScenarioKind::Boxes);
    for (const Method& m : methods) {
      auto results = runTrials(sc, m, n_trials, seed0, cfg);
      report.records.insert(report.records.end(), results.begin(), results.end());
    }
  }
  report.rows = aggregate(report.records);
  return report;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string stat(const Summary& s, int n) { return n ? fmt("%.2f", s.mean) + " +/- " + fmt("%.2f", s.std) : "-"; }

}  // namespace

std::string reportTable(const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> cells{
      {"scenario", "method", "trials", "SR", "L_agent1", "L_agent2", "L_obj"}};
  for (const auto& r : rows) {
    cells.push_back({r.scenario, r.method, std::to_string(r.trials), fmt("%.0f%%", 100.0 * r.success_rate),
                     stat(r.l_agent1, r.successes), stat(r.l_agent2, r.successes), stat(r.l_obj, r.successes)});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t c = 0; c < cells[i].size(); ++c) {
      if (c) out += "  ";
      const std::string& s = cells[i][c];
      // Text columns left-aligned, numbers right-aligned.
      if (c < 2) out += s + std::string(width[c] - s.size(), ' ');
      else out += std::string(width[c] - s.size(), ' ') + s;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (const auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
    }
  }
  return out;
}

std::string recordsToCsv(const std::vector<TrialResult>& records) {
  std::string out = "scenario,method,seed,success,termination,l_agent1,l_agent2,l_obj,deep_collision_steps\n";
  for (const auto& r : records) {
    out += r.scenario + ',' + r.method + ',' + std::to_string(r.seed) + ',' + (r.success ? "1" : "0") + ',' +
           r.termination + ',' + fmt("%.17g", r.l_agent1) + ',' + fmt("%.17g", r.l_agent2) + ',' +
           fmt("%.17g", r.l_obj) + ',' + std::to_string(r.deep_collision_steps) + '\n';
  }
  return out;
}

std::vector<TrialResult> recordsFromCsv(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || line.rfind("scenario,method,seed", 0) != 0)
    throw std::runtime_error("records: missing header");
  std::vector<TrialResult> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (f.size() != 9) throw std::runtime_error("records: wrong field count");
    TrialResult r;
    try {
      r.scenario = f[0];
      r.method = f[1];
      r.seed = std::stoull(f[2]);
      r.success = f[3] == "1";
      r.termination = f[4];
      r.l_agent1 = std::stod(f[5]);
      r.l_agent2 = std::stod(f[6]);
      r.l_obj = std::stod(f[7]);
      r.deep_collision_steps = std::stoi(f[8]);
    } catch (const std::exception&) {
      throw std::runtime_error("records: bad field in line '" + line + "'");
    }
    out.push_back(r);
  }
  return out;
}

std::string timingCsv(const BenchReport& report) {
  std::string out = "scenario,method,seed,latency_s\n";
  for (const auto& r : report.records)
    out += r.scenario + ',' + r.method + ',' + std::to_string(r.seed) + ',' + fmt("%.6g", r.latency) + '\n';
  out += "\nscenario,method,mean_latency_s\n";
  for (const auto& row : report.rows)
    out += row.scenario + ',' + row.method + ',' + fmt("%.6g", row.mean_latency) + '\n';
  return out;
}

}  // namespace duocarry
