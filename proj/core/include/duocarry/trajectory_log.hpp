#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "duocarry/geometry.hpp"
#include "duocarry/reward.hpp"
#include "duocarry/system_sim.hpp"

namespace duocarry {

/// One row of a trajectory log: the state after a high-level step together
/// with the action that produced it.
struct LogRecord {
  int step = 0;
  double time = 0.0;
  Pose2 agent1;
  Vec2 agent1_velocity;
  double agent1_yaw_rate = 0.0;
  Pose2 agent2;
  Vec2 agent2_velocity;
  double agent2_yaw_rate = 0.0;
  Pose2 object;
  Twist2 object_velocity;
  Action action{};
  RewardBreakdown reward;
  std::array<double, 3> penetration{};  ///< agent1, agent2, bar
};

LogRecord makeLogRecord(int step, const SystemState& s, const Action& action, const RewardBreakdown& reward,
                        const std::vector<Contact>& contacts);

using TrajectoryLog = std::vector<LogRecord>;

/// Comma-separated text with a header row. Numbers are written with 17
/// significant digits so a read-back reproduces every value exactly.
void writeTrajectoryCsv(std::ostream& os, const TrajectoryLog& log);
std::string trajectoryToCsv(const TrajectoryLog& log);
/// Throws std::runtime_error on a header or field mismatch.
TrajectoryLog trajectoryFromCsv(std::string_view text);

struct PathLengths {
  double agent1 = 0.0;
  double agent2 = 0.0;
  double object = 0.0;
};

/// Sum of consecutive position increments.
double polylineLength(const std::vector<Vec2>& points);
PathLengths pathLengths(const TrajectoryLog& log);

/// Long-format per-frame paths (frame,step,time,x,y) for plotting.
std::string exportFramePaths(const TrajectoryLog& log);

}  // namespace duocarry
