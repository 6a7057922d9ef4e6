#include "duocarry/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace duocarry {

using json = nlohmann::ordered_json;

namespace {

// Enumerates every configurable field with its key path. The same walk
// drives parsing, serialization, and the schema document.
template <class V>
void visitConfig(AppConfig& c, V& v) {
  v.section("terrain", [&] {
    v.field("n_levels", c.terrain.n_levels);
    v.field("d_max", c.terrain.d_max);
    v.field("obstacle_height", c.terrain.obstacle_height);
    v.field("size_min", c.terrain.size_min);
    v.field("size_max", c.terrain.size_max);
    v.field("subterrain_extent", c.terrain.subterrain_extent);
    v.field("grid_columns", c.terrain.grid_columns);
    v.field("seed", c.terrain.rng_seed);
    v.field("max_placement_attempts", c.terrain.max_placement_attempts);
  });
  v.section("graph", [&] {
    v.field("n_points", c.graph.n_points);
    v.field("clearance", c.graph.clearance);
    v.field("connection_radius", c.graph.connection_radius);
    v.field("max_attempts_per_point", c.graph.max_attempts_per_point);
  });
  v.section("paths", [&] {
    v.field("l_min", c.paths.l_min);
    v.field("l_max", c.paths.l_max);
    v.field("n_keep", c.paths.n_keep);
    v.field("source_cap", c.paths.source_cap);
  });
  v.section("sim", [&] {
    v.field("bar_length", c.sim.bar_length);
    v.field("dt", c.sim.dt);
    v.field("substep", c.sim.substep);
    v.field("tau_v", c.sim.tau_v);
    v.field("v_max", c.sim.v_max);
    v.field("omega_max", c.sim.omega_max);
    v.field("footprint_half_length", c.sim.footprint.half_length);
    v.field("footprint_half_width", c.sim.footprint.half_width);
    v.field("stand_window", c.sim.stand_window);
    v.field("deep_penetration", c.sim.deep_penetration);
    v.field("deep_duration", c.sim.deep_duration);
  });
  v.section("reward", [&] {
    v.field("w1", c.reward.w1);
    v.field("w2", c.reward.w2);
    v.field("w3", c.reward.w3);
    v.field("w4", c.reward.w4);
    v.field("w5", c.reward.w5);
    v.field("w6", c.reward.w6);
    v.field("w7", c.reward.w7);
    v.field("w8", c.reward.w8);
    v.field("w9", c.reward.w9);
    v.field("alpha", c.reward.alpha);
    v.field("beta", c.reward.beta);
    v.field("d_s_base", c.reward.d_s_base);
    v.field("d_s_obj", c.reward.d_s_obj);
    v.field("delta", c.reward.delta);
    v.field("tau", c.reward.tau);
    v.field("contact_threshold", c.reward.contact_threshold);
    v.field("contact_stiffness", c.reward.contact_stiffness);
    v.field("rest_speed", c.reward.rest_speed);
  });
  v.section("sensor", [&] {
    v.field("map_size", c.sensor.map_size);
    v.field("resolution", c.sensor.resolution);
    v.field("sensor_height", c.sensor.sensor_height);
  });
  v.section("policy_map", [&] {
    v.field("rows", c.policy_map.rows);
    v.field("cols", c.policy_map.cols);
    v.field("resolution", c.policy_map.resolution);
  });
  v.section("augment", [&] {
    v.field("enabled", c.augment_maps);
    v.field("noise_std", c.augment.noise_std);
    v.field("artifact_probability", c.augment.artifact_probability);
    v.field("artifact_height", c.augment.artifact_height);
  });
  v.section("episode", [&] {
    v.field("max_time", c.max_time);
    v.field("reach_radius", c.reach_radius);
    v.field("relative_heights", c.relative_heights);
    v.field("start_jitter_position", c.start_jitter_position);
    v.field("start_jitter_yaw", c.start_jitter_yaw);
  });
  v.section("tracker", [&] {
    v.field("speed", c.tracker.speed);
    v.field("yaw_gain", c.tracker.yaw_gain);
    v.field("yaw_rate_max", c.tracker.yaw_rate_max);
    v.field("relative_yaw_gain", c.tracker.relative_yaw_gain);
    v.field("repulsion_gain", c.tracker.repulsion_gain);
    v.field("repulsion_cutoff", c.tracker.repulsion_cutoff);
    v.field("repulsion_max", c.tracker.repulsion_max);
    v.field("height_threshold", c.tracker.height_threshold);
    v.field("saturation", c.tracker.saturation);
  });
  v.section("prm", [&] {
    v.field("n_samples", c.prm.n_samples);
    v.field("k_neighbors", c.prm.k_neighbors);
    v.field("n_interp", c.prm.n_interp);
    v.field("max_pose_step", c.prm.max_pose_step);
    v.field("yaw_weight", c.prm.yaw_weight);
    v.field("window_length", c.prm.window_length);
    v.field("window_width", c.prm.window_width);
    v.field("replan_budget", c.prm.replan_budget);
    v.field("exec_speed", c.prm.exec_speed);
    v.field("max_sample_attempts", c.prm.max_sample_attempts);
    v.field("start_connect_tries", c.prm.start_connect_tries);
    v.field("shortcut", c.prm.shortcut);
  });
  v.section("bench", [&] { v.field("threads", c.threads); });
}

class Reader {
 public:
  explicit Reader(const json& root) { stack_.push_back(&root); }

  template <class F>
  void section(const char* name, F&& body) {
    const json& parent = *stack_.back();
    if (!parent.contains(name)) return;
    const json& sec = parent.at(name);
    if (!sec.is_object()) fail(std::string(name), "must be an object");
    prefix_ = std::string(name) + ".";
    stack_.push_back(&sec);
    seen_.clear();
    body();
    for (const auto& [k, _] : sec.items())
      if (!seen_.count(k)) fail(prefix_ + k, "is not a known key");
    stack_.pop_back();
    prefix_.clear();
  }

  void field(const char* name, double& out) {
    if (const json* v = find(name)) {
      if (!v->is_number()) fail(prefix_ + name, "must be a number");
      out = v->get<double>();
    }
  }
  void field(const char* name, int& out) {
    if (const json* v = find(name)) {
      if (!v->is_number_integer()) fail(prefix_ + name, "must be an integer");
      out = v->get<int>();
    }
  }
  void field(const char* name, std::uint64_t& out) {
    if (const json* v = find(name)) {
      if (!v->is_number_unsigned()) fail(prefix_ + name, "must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void field(const char* name, bool& out) {
    if (const json* v = find(name)) {
      if (!v->is_boolean()) fail(prefix_ + name, "must be a boolean");
      out = v->get<bool>();
    }
  }

 private:
  const json* find(const char* name) {
    seen_.insert(name);
    const json& sec = *stack_.back();
    return sec.contains(name) ? &sec.at(name) : nullptr;
  }
  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw std::invalid_argument("config: '" + key + "' " + what);
  }

  std::vector<const json*> stack_;
  std::set<std::string> seen_;
  std::string prefix_;
};

class Writer {
 public:
  template <class F>
  void section(const char* name, F&& body) {
    current_ = json::object();
    body();
    root[name] = current_;
  }
  template <class T>
  void field(const char* name, T& value) {
    current_[name] = value;
  }
  json root = json::object();

 private:
  json current_;
};

class SchemaWriter {
 public:
  template <class F>
  void section(const char* name, F&& body) {
    props_ = json::object();
    body();
    json sec{{"type", "object"}, {"additionalProperties", false}, {"properties", props_}};
    sections_[name] = sec;
  }
  void field(const char* name, double& v) { props_[name] = json{{"type", "number"}, {"default", v}}; }
  void field(const char* name, int& v) { props_[name] = json{{"type", "integer"}, {"default", v}}; }
  void field(const char* name, std::uint64_t& v) {
    props_[name] = json{{"type", "integer"}, {"minimum", 0}, {"default", v}};
  }
  void field(const char* name, bool& v) { props_[name] = json{{"type", "boolean"}, {"default", v}}; }

  json document() const {
    json props = json{{"$schema", json{{"type", "string"}}}};
    props.update(sections_);
    return json{{"$schema", "https://json-schema.org/draft/2020-12/schema"},
                {"title", "carrybench configuration"},
                {"type", "object"},
                {"additionalProperties", false},
                {"properties", props}};
  }

 private:
  json props_;
  json sections_ = json::object();
};

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("config: ") + what);
}

}  // namespace

void AppConfig::validate() const {
  terrain.validate();
  sim.validate();
  reward.validate();
  prm.validate();
  require(graph.n_points > 0 && graph.clearance >= 0.0 && graph.connection_radius > 0.0 &&
              graph.max_attempts_per_point > 0,
          "graph settings must be positive");
  require(paths.l_min >= 0.0 && paths.l_max >= paths.l_min && paths.n_keep >= 0 && paths.source_cap > 0,
          "paths needs 0 <= l_min <= l_max and positive caps");
  require(sensor.map_size > 0.0 && sensor.resolution > 0.0 && sensor.sensor_height >= 0.0,
          "sensor sizes must be positive");
  require(policy_map.rows > 0 && policy_map.cols > 1 && policy_map.resolution > 0.0,
          "policy_map needs rows > 0, cols > 1, resolution > 0");
  require(augment.noise_std >= 0.0 && augment.artifact_probability >= 0.0 && augment.artifact_probability <= 1.0,
          "augment needs noise_std >= 0 and a probability in [0, 1]");
  require(max_time > 0.0 && reach_radius > 0.0, "episode max_time and reach_radius must be positive");
  require(start_jitter_position >= 0.0 && start_jitter_yaw >= 0.0, "start jitter must be non-negative");
  require(tracker.speed >= 0.0 && tracker.repulsion_cutoff > 0.0 && tracker.saturation > 0.0 && tracker.saturation < 1.0,
          "tracker needs speed >= 0, cutoff > 0, saturation in (0, 1)");
  require(threads >= 0, "bench.threads must be >= 0");
}

AppConfig configFromJson(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
  AppConfig cfg;
  Reader r(root);
  visitConfig(cfg, r);
  const std::set<std::string> known{"terrain", "graph",   "paths",   "sim", "reward", "sensor", "policy_map",
                                    "augment", "episode", "tracker", "prm", "bench",  "$schema"};
  for (const auto& [k, _] : root.items())
    if (!known.count(k)) throw std::invalid_argument("config: '" + k + "' is not a known section");
  cfg.reward.t_stand = cfg.sim.stand_window;
  cfg.tracker.bar_length = cfg.sim.bar_length;
  cfg.tracker.v_max = cfg.sim.v_max;
  cfg.tracker.map = cfg.policy_map;
  cfg.prm.bar_length = cfg.sim.bar_length;
  cfg.prm.footprint = cfg.sim.footprint;
  cfg.prm.reach_radius = cfg.reach_radius;
  cfg.prm.exec_dt = cfg.sim.dt;
  cfg.validate();
  return cfg;
}

AppConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return configFromJson(ss.str());
}

std::string configToJson(const AppConfig& cfg) {
  AppConfig copy = cfg;
  Writer w;
  visitConfig(copy, w);
  return w.root.dump(2) + "\n";
}

std::string configSchemaJson() {
  AppConfig defaults;
  SchemaWriter s;
  visitConfig(defaults, s);
  return s.document().dump(2) + "\n";
}

EpisodeConfig episodeConfig(const AppConfig& cfg, const std::vector<Vec2>& waypoints, std::uint64_t seed) {
  EpisodeConfig ep;
  ep.path.waypoints = waypoints;
  ep.seed = seed;
  ep.sim = cfg.sim;
  ep.reward = cfg.reward;
  ep.sensor = cfg.sensor;
  ep.policy_map = cfg.policy_map;
  ep.augment = cfg.augment;
  ep.augment_maps = cfg.augment_maps;
  ep.relative_heights = cfg.relative_heights;
  ep.v_max = cfg.sim.v_max;
  ep.v_min = -cfg.sim.v_max;
  ep.reach_radius = cfg.reach_radius;
  ep.max_steps = static_cast<int>(std::lround(cfg.max_time / cfg.sim.dt));
  ep.start_jitter_position = cfg.start_jitter_position;
  ep.start_jitter_yaw = cfg.start_jitter_yaw;
  return ep;
}

}  // namespace duocarry
