#include "duocarry/protocol.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace duocarry {

using json = nlohmann::ordered_json;

ProtocolSession::ProtocolSession(AppConfig cfg) : cfg_(std::move(cfg)) {}
ProtocolSession::~ProtocolSession() = default;

namespace {

json observationJson(const Observation& obs) { return obs.flatten(); }

}  // namespace

std::string ProtocolSession::handle(std::string_view request) {
  json reply;
  try {
    const json req = json::parse(request);
    if (!req.is_object() || !req.contains("op") || !req["op"].is_string())
      throw std::invalid_argument("request needs a string 'op'");
    const std::string op = req["op"];
    if (op == "reset") {
      const ScenarioKind kind = parseScenario(req.value("scenario", std::string("empty")));
      const bool dynamic = req.value("dynamic", false);
      const std::uint64_t seed = req.value("seed", std::uint64_t{0});
      env_.reset();
      scenario_ = std::make_unique<Scenario>(makeScenario(kind, dynamic));
      env_ = std::make_unique<Environment>(scenario_->terrain, episodeConfig(cfg_, scenario_->waypoints, seed));
      const Observation obs = env_->reset(scenario_->start);
      reply = {{"ok", true},
               {"observation", observationJson(obs)},
               {"proprio_size", Observation::kProprio},
               {"map_rows", obs.map_rows},
               {"map_cols", obs.map_cols}};
    } else if (op == "step") {
      if (!env_) throw std::logic_error("step before reset");
      const json& a = req.at("action");
      if (!a.is_array() || a.size() != 6) throw std::invalid_argument("action must be an array of 6 numbers");
      Action raw{};
      for (std::size_t i = 0; i < 6; ++i) {
        if (!a[i].is_number()) throw std::invalid_argument("action must be an array of 6 numbers");
        raw[i] = a[i].get<double>();
      }
      const StepResult r = env_->step(raw);
      json terms = json::object();
      const auto values = r.reward.terms();
      for (std::size_t i = 0; i < values.size(); ++i) terms[std::string(RewardBreakdown::termNames()[i])] = values[i];
      reply = {{"ok", true},
               {"observation", observationJson(r.observation)},
               {"reward", r.reward.total},
               {"terms", terms},
               {"done", r.termination.has_value()},
               {"termination", r.termination ? json(std::string(terminationName(*r.termination))) : json(nullptr)}};
    } else if (op == "close") {
      closed_ = true;
      reply = {{"ok", true}};
    } else {
      throw std::invalid_argument("unknown op '" + op + "'");
    }
  } catch (const std::exception& e) {
    reply = {{"ok", false}, {"error", e.what()}};
  }
  return reply.dump();
}

void serve(std::istream& in, std::ostream& out, const AppConfig& cfg) {
  ProtocolSession session(cfg);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (line.empty()) continue;
    out << session.handle(line) << '\n' << std::flush;
  }
}

}  // namespace duocarry
