#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "duocarry/protocol.hpp"

using namespace duocarry;
using nlohmann::json;

TEST_CASE("reset, step and close") {
  ProtocolSession s{AppConfig{}};
  const json reset = json::parse(s.handle(R"({"op": "reset", "scenario": "corridor", "seed": 3})"));
  REQUIRE(reset["ok"] == true);
  CHECK(reset["observation"].size() == 279);
  CHECK(reset["proprio_size"] == 19);
  CHECK(reset["map_rows"] == 13);
  CHECK(reset["map_cols"] == 20);

  const json step = json::parse(s.handle(R"({"op": "step", "action": [0.5, 0, 0, 0.5, 0, 0]})"));
  REQUIRE(step["ok"] == true);
  CHECK(step["observation"].size() == 279);
  CHECK(step["done"] == false);
  CHECK(step["termination"].is_null());
  CHECK(step["terms"].size() == 11);
  double sum = 0.0;
  for (const auto& [k, v] : step["terms"].items()) sum += v.get<double>();
  CHECK(step["reward"].get<double>() == doctest::Approx(sum));
  // Commanded velocities appear in the last-action slots, bounded by tanh.
  CHECK(step["observation"][5].get<double>() == doctest::Approx(0.8 * std::tanh(0.5 / 0.8)));

  CHECK(json::parse(s.handle(R"({"op": "close"})"))["ok"] == true);
  CHECK(s.closed());
}

TEST_CASE("identical sessions produce identical replies") {
  ProtocolSession a{AppConfig{}}, b{AppConfig{}};
  for (const char* req : {R"({"op": "reset", "scenario": "boxes", "seed": 1})",
                          R"({"op": "step", "action": [0.2, 0.1, 0, 0.2, 0.1, 0]})",
                          R"({"op": "step", "action": [0.3, 0.0, 0.1, 0.3, 0.0, 0.1]})"})
    CHECK(a.handle(req) == b.handle(req));
}

TEST_CASE("malformed requests get error replies") {
  ProtocolSession s{AppConfig{}};
  for (const char* req : {"not json", R"({"op": 3})", R"({"op": "fly"})", R"({"op": "step", "action": [0, 0, 0, 0, 0, 0]})",
                          R"({"op": "reset", "scenario": "maze"})", R"({"op": "reset", "scenario": "empty", "dynamic": true})"}) {
    CAPTURE(req);
    const json r = json::parse(s.handle(req));
    CHECK(r["ok"] == false);
    CHECK(r["error"].is_string());
  }
  s.handle(R"({"op": "reset"})");
  for (const char* req : {R"({"op": "step", "action": [0, 0, 0]})", R"({"op": "step", "action": [0, 0, 0, 0, 0, "x"]})",
                          R"({"op": "step"})"}) {
    CAPTURE(req);
    CHECK(json::parse(s.handle(req))["ok"] == false);
  }
  CHECK_FALSE(s.closed());
}

TEST_CASE("serve answers one line per request and stops at close") {
  std::istringstream in(R"({"op": "reset", "scenario": "empty"})"
                        "\n\n"
                        R"({"op": "step", "action": [0, 0, 0, 0, 0, 0]})"
                        "\n"
                        R"({"op": "close"})"
                        "\n"
                        R"({"op": "step", "action": [0, 0, 0, 0, 0, 0]})"
                        "\n");
  std::ostringstream out;
  serve(in, out, AppConfig{});
  std::istringstream replies(out.str());
  std::string line;
  int n = 0;
  while (std::getline(replies, line)) {
    CHECK(json::parse(line)["ok"] == true);
    ++n;
  }
  CHECK(n == 3);
}
