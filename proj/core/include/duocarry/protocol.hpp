#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "duocarry/config.hpp"
#include "duocarry/env.hpp"

namespace duocarry {

/// Line-oriented JSON step/reset protocol so learners outside C++ can drive
/// an environment. Each request is one JSON object per line:
///   {"op": "reset", "scenario": "corridor", "seed": 3, "dynamic": false}
///   {"op": "step", "action": [a0, a1, a2, a3, a4, a5]}
///   {"op": "close"}
/// Each reply is one line with "ok" and either the payload or "error".
/// Observations are flat arrays in the Observation layout; step replies add
/// "reward", "terms" (per reward term), "done", and "termination".
class ProtocolSession {
 public:
  explicit ProtocolSession(AppConfig cfg);
  ~ProtocolSession();

  std::string handle(std::string_view request);
  bool closed() const { return closed_; }

 private:
  AppConfig cfg_;
  std::unique_ptr<Scenario> scenario_;
  std::unique_ptr<Environment> env_;
  bool closed_ = false;
};

/// Reads requests until "close" or end of input, writing one reply per line.
void serve(std::istream& in, std::ostream& out, const AppConfig& cfg);

}  // namespace duocarry
