#include "duocarry/trajectory_log.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace duocarry {

LogRecord makeLogRecord(int step, const SystemState& s, const Action& action, const RewardBreakdown& reward,
                        const std::vector<Contact>& contacts) {
  LogRecord r;
  r.step = step;
  r.time = s.time;
  r.agent1 = s.agent1.pose;
  r.agent1_velocity = s.agent1.velocity_world;
  r.agent1_yaw_rate = s.agent1.yaw_rate;
  r.agent2 = s.agent2.pose;
  r.agent2_velocity = s.agent2.velocity_world;
  r.agent2_yaw_rate = s.agent2.yaw_rate;
  r.object = s.object_pose;
  r.object_velocity = s.object_velocity;
  r.action = action;
  r.reward = reward;
  for (const auto& c : contacts) r.penetration[static_cast<std::size_t>(c.body)] = c.penetration;
  return r;
}

namespace {

std::vector<std::string> headerColumns() {
  std::vector<std::string> cols{"step", "time"};
  for (const char* a : {"a1", "a2"}) {
    for (const char* f : {"x", "y", "yaw", "vx", "vy", "wz"}) cols.push_back(std::string(a) + "_" + f);
  }
  for (const char* f : {"x", "y", "yaw", "vx", "vy", "wz"}) cols.push_back(std::string("obj_") + f);
  for (int i = 0; i < 6; ++i) cols.push_back("act" + std::to_string(i));
  for (const auto n : RewardBreakdown::termNames()) cols.emplace_back(n);
  cols.emplace_back("r_total");
  for (const char* b : {"pen_a1", "pen_a2", "pen_bar"}) cols.emplace_back(b);
  return cols;
}

std::vector<double> rowValues(const LogRecord& r) {
  std::vector<double> v{r.time,
                        r.agent1.position.x, r.agent1.position.y, r.agent1.yaw,
                        r.agent1_velocity.x, r.agent1_velocity.y, r.agent1_yaw_rate,
                        r.agent2.position.x, r.agent2.position.y, r.agent2.yaw,
                        r.agent2_velocity.x, r.agent2_velocity.y, r.agent2_yaw_rate,
                        r.object.position.x, r.object.position.y, r.object.yaw,
                        r.object_velocity.linear.x, r.object_velocity.linear.y, r.object_velocity.angular};
  v.insert(v.end(), r.action.begin(), r.action.end());
  for (const double t : r.reward.terms()) v.push_back(t);
  v.push_back(r.reward.total);
  v.insert(v.end(), r.penetration.begin(), r.penetration.end());
  return v;
}

void appendNumber(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

void writeTrajectoryCsv(std::ostream& os, const TrajectoryLog& log) { os << trajectoryToCsv(log); }

std::string trajectoryToCsv(const TrajectoryLog& log) {
  std::string out;
  const auto cols = headerColumns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  for (const auto& r : log) {
    out += std::to_string(r.step);
    for (const double v : rowValues(r)) {
      out += ',';
      appendNumber(out, v);
    }
    out += '\n';
  }
  return out;
}

TrajectoryLog trajectoryFromCsv(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  const auto cols = headerColumns();
  if (!std::getline(is, line)) throw std::runtime_error("trajectory log is empty");
  {
    std::string expected;
    for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
    if (line != expected) throw std::runtime_error("trajectory log header mismatch");
  }
  TrajectoryLog log;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> f;
    std::size_t start = 0;
    while (start <= line.size()) {
      const auto end = line.find(',', start);
      const std::string tok = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
      try {
        f.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw std::runtime_error("trajectory log: bad number '" + tok + "'");
      }
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (f.size() != cols.size()) throw std::runtime_error("trajectory log: wrong field count");
    LogRecord r;
    std::size_t i = 0;
    r.step = static_cast<int>(f[i++]);
    r.time = f[i++];
    auto pose = [&] { Pose2 p{{f[i], f[i + 1]}, f[i + 2]}; i += 3; return p; };
    auto vec = [&] { Vec2 v{f[i], f[i + 1]}; i += 2; return v; };
    r.agent1 = pose();
    r.agent1_velocity = vec();
    r.agent1_yaw_rate = f[i++];
    r.agent2 = pose();
    r.agent2_velocity = vec();
    r.agent2_yaw_rate = f[i++];
    r.object = pose();
    r.object_velocity.linear = vec();
    r.object_velocity.angular = f[i++];
    for (auto& a : r.action) a = f[i++];
    r.reward.tracking = f[i++];
    r.reward.alignment = f[i++];
    r.reward.dist_obj = f[i++];
    r.reward.dist_base1 = f[i++];
    r.reward.dist_base2 = f[i++];
    r.reward.internal_forces = f[i++];
    r.reward.contacts = f[i++];
    r.reward.stand = f[i++];
    r.reward.obj_acc = f[i++];
    r.reward.action_rate = f[i++];
    r.reward.ang_vel = f[i++];
    r.reward.total = f[i++];
    for (auto& p : r.penetration) p = f[i++];
    log.push_back(r);
  }
  return log;
}

double polylineLength(const std::vector<Vec2>& points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += (points[i] - points[i - 1]).norm();
  return total;
}

PathLengths pathLengths(const TrajectoryLog& log) {
  PathLengths L;
  for (std::size_t i = 1; i < log.size(); ++i) {
    L.agent1 += (log[i].agent1.position - log[i - 1].agent1.position).norm();
    L.agent2 += (log[i].agent2.position - log[i - 1].agent2.position).norm();
    L.object += (log[i].object.position - log[i - 1].object.position).norm();
  }
  return L;
}

std::string exportFramePaths(const TrajectoryLog& log) {
  std::string out = "frame,step,time,x,y\n";
  auto emit = [&](const char* frame, auto get) {
    for (const auto& r : log) {
      const Vec2 p = get(r);
      out += frame;
      out += ',' + std::to_string(r.step) + ',';
      appendNumber(out, r.time);
      out += ',';
      appendNumber(out, p.x);
      out += ',';
      appendNumber(out, p.y);
      out += '\n';
    }
  };
  emit("agent1", [](const LogRecord& r) { return r.agent1.position; });
  emit("agent2", [](const LogRecord& r) { return r.agent2.position; });
  emit("object", [](const LogRecord& r) { return r.object.position; });
  return out;
}

}  // namespace duocarry
