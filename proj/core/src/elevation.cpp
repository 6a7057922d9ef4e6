#include "duocarry/elevation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "duocarry/random.hpp"

namespace duocarry {

HeightMap::HeightMap(const Pose2& frame_, int rows_, int cols_, double resolution_)
    : frame(frame_), rows(rows_), cols(cols_), resolution(resolution_) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("height map dimensions must be non-negative");
  if (!(resolution > 0.0)) throw std::invalid_argument("height map resolution must be positive");
  cells.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
  valid.assign(cells.size(), 0);
}

Vec2 HeightMap::cellCenterLocal(int r, int c) const {
  return {(r - (rows - 1) * 0.5) * resolution, (c - (cols - 1) * 0.5) * resolution};
}

Vec2 HeightMap::cellCenterWorld(int r, int c) const { return frameToWorld(cellCenterLocal(r, c), frame); }

std::optional<std::size_t> HeightMap::cellAt(const Vec2& p_world) const {
  const Vec2 local = worldToFrame(p_world, frame);
  const double fr = local.x / resolution + (rows - 1) * 0.5;
  const double fc = local.y / resolution + (cols - 1) * 0.5;
  const long r = std::lround(fr);
  const long c = std::lround(fc);
  if (r < 0 || c < 0 || r >= rows || c >= cols) return std::nullopt;
  return index(static_cast<int>(r), static_cast<int>(c));
}

void HeightMap::validate() const {
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (rows < 0 || cols < 0 || cells.size() != n || valid.size() != n)
    throw std::invalid_argument("height map storage does not match its dimensions");
  if (!(resolution > 0.0)) throw std::invalid_argument("height map resolution must be positive");
}

namespace {

// Parameter interval of segment a->b inside the closed box; empty when lo >= hi.
std::pair<double, double> clipSegment(const Vec2& a, const Vec2& b, const Vec2& lo, const Vec2& hi) {
  double s0 = 0.0, s1 = 1.0;
  const Vec2 d = b - a;
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    const double r = q / p;
    if (p < 0.0) {
      if (r > s1) return false;
      s0 = std::max(s0, r);
    } else {
      if (r < s0) return false;
      s1 = std::min(s1, r);
    }
    return true;
  };
  if (!clip(-d.x, a.x - lo.x) || !clip(d.x, hi.x - a.x) || !clip(-d.y, a.y - lo.y) || !clip(d.y, hi.y - a.y))
    return {1.0, 0.0};
  return {s0, s1};
}

}  // namespace

HeightMap sense(const Terrain& terrain, const Pose2& agent_pose, double t, const SensorConfig& cfg) {
  if (!(cfg.resolution > 0.0) || !(cfg.map_size > 0.0)) throw std::invalid_argument("invalid sensor config");
  const int n = static_cast<int>(std::lround(cfg.map_size / cfg.resolution));
  HeightMap m(Pose2{agent_pose.position, 0.0}, n, n, cfg.resolution);
  const double half = 0.5 * n * cfg.resolution;
  const Rect window{agent_pose.position - Vec2{half, half}, agent_pose.position + Vec2{half, half}};

  struct PlacedBox {
    Vec2 lo, hi;
    double height;
  };
  std::vector<PlacedBox> boxes;
  for (const auto& b : terrain.obstaclesNear(window, t)) {
    const Vec2 c = b.centerAt(t);
    boxes.push_back({c - b.half_extents, c + b.half_extents, b.height});
  }

  const Vec2 eye = agent_pose.position;
  const double zs = cfg.sensor_height;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Vec2 p = m.cellCenterWorld(r, c);
      if (!terrain.bounds().contains(p)) continue;
      double h = 0.0;
      for (const auto& b : boxes) {
        if (p.x > b.lo.x && p.x < b.hi.x && p.y > b.lo.y && p.y < b.hi.y) h = std::max(h, b.height);
      }
      bool blocked = false;
      for (const auto& b : boxes) {
        const auto [s0, s1] = clipSegment(eye, p, b.lo, b.hi);
        if (!(s0 < s1)) continue;
        const bool target_inside = p.x > b.lo.x && p.x < b.hi.x && p.y > b.lo.y && p.y < b.hi.y;
        const double z0 = zs + (h - zs) * s0;
        if (target_inside) {
          if (s0 <= 0.0 || z0 >= b.height) continue;
          // Visible face: the sight line enters the box within one cell of this one.
          const Vec2 entry = eye + (p - eye) * s0;
          const Vec2 off = worldToFrame(entry, m.frame) - worldToFrame(p, m.frame);
          const double reach = cfg.resolution + 1e-9;
          if (std::abs(off.x) <= reach && std::abs(off.y) <= reach) continue;
          blocked = true;
          break;
        }
        const double z1 = zs + (h - zs) * s1;
        if (std::min(z0, z1) < b.height) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        const auto i = m.index(r, c);
        m.cells[i] = h;
        m.valid[i] = 1;
      }
    }
  }
  return m;
}

HeightMap maxFilter(const HeightMap& m) {
  m.validate();
  HeightMap out = m;
  const int rows = m.rows, cols = m.cols;
  std::vector<std::size_t> frontier;
  std::vector<std::uint8_t> queued(out.size(), 0);

  auto push_invalid_neighbors = [&](int r, int c, std::vector<std::size_t>& into) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const int rr = r + dr, cc = c + dc;
        if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= rows || cc >= cols) continue;
        const auto j = out.index(rr, cc);
        if (!out.valid[j] && !queued[j]) {
          queued[j] = 1;
          into.push_back(j);
        }
      }
    }
  };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (out.isValid(r, c)) push_invalid_neighbors(r, c, frontier);
    }
  }

  std::vector<double> wave_values;
  std::vector<std::size_t> next;
  while (!frontier.empty()) {
    // Values come from cells valid before this wave (synchronous update).
    wave_values.assign(frontier.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      const int r = static_cast<int>(frontier[k] / static_cast<std::size_t>(cols));
      const int c = static_cast<int>(frontier[k] % static_cast<std::size_t>(cols));
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= rows || cc >= cols) continue;
          const auto j = out.index(rr, cc);
          if (out.valid[j]) wave_values[k] = std::max(wave_values[k], out.cells[j]);
        }
      }
    }
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      out.cells[frontier[k]] = wave_values[k];
      out.valid[frontier[k]] = 1;
    }
    next.clear();
    for (const auto i : frontier) {
      push_invalid_neighbors(static_cast<int>(i / static_cast<std::size_t>(cols)),
                             static_cast<int>(i % static_cast<std::size_t>(cols)), next);
    }
    frontier.swap(next);
  }
  return out;
}

HeightMap fuse(const HeightMap& m1, const HeightMap& m2, const Pose2& object_frame, const PolicyMapConfig& cfg) {
  m1.validate();
  m2.validate();
  HeightMap out(object_frame, cfg.rows, cfg.cols, cfg.resolution);
  const double src_res = std::min(m1.resolution, m2.resolution);
  const int sub = std::max(1, static_cast<int>(std::ceil(cfg.resolution / src_res - 1e-9)));
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      const Vec2 center = out.cellCenterLocal(r, c);
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < sub; ++i) {
        for (int j = 0; j < sub; ++j) {
          const Vec2 local = center + Vec2{((i + 0.5) / sub - 0.5) * cfg.resolution,
                                           ((j + 0.5) / sub - 0.5) * cfg.resolution};
          const Vec2 p = frameToWorld(local, object_frame);
          for (const HeightMap* src : {&m1, &m2}) {
            const auto k = src->cellAt(p);
            if (k && src->valid[*k]) best = std::max(best, src->cells[*k]);
          }
        }
      }
      const auto idx = out.index(r, c);
      if (best > -std::numeric_limits<double>::infinity()) {
        out.cells[idx] = best;
        out.valid[idx] = 1;
      }
    }
  }
  return out;
}

HeightMap augment(const HeightMap& m, const AugmentConfig& cfg, std::uint64_t seed) {
  if (cfg.noise_std < 0.0 || cfg.artifact_probability < 0.0 || cfg.artifact_probability > 1.0)
    throw std::invalid_argument("invalid augmentation config");
  HeightMap out = m;
  Rng rng(seed);
  for (auto& h : out.cells) {
    if (cfg.artifact_probability > 0.0 && rng.bernoulli(cfg.artifact_probability))
      h = std::max(h, cfg.artifact_height);
    if (cfg.noise_std > 0.0) h += rng.normal(0.0, cfg.noise_std);
  }
  return out;
}

std::string heightMapToText(const HeightMap& m) {
  m.validate();
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# duocarry-heightmap v1\n";
  os << "frame " << m.frame.position.x << ' ' << m.frame.position.y << ' ' << m.frame.yaw << '\n';
  os << "dims " << m.rows << ' ' << m.cols << '\n';
  os << "resolution " << m.resolution << '\n';
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (c) os << ' ';
      if (m.isValid(r, c)) {
        os << m.at(r, c);
      } else {
        os << "nan";
      }
    }
    os << '\n';
  }
  return os.str();
}

HeightMap heightMapFromText(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line, key;
  if (!std::getline(is, line) || line != "# duocarry-heightmap v1") throw std::runtime_error("not a height map file");
  Pose2 frame;
  int rows = 0, cols = 0;
  double res = 0.0;
  if (!(is >> key >> frame.position.x >> frame.position.y >> frame.yaw) || key != "frame")
    throw std::runtime_error("height map: bad frame line");
  if (!(is >> key >> rows >> cols) || key != "dims") throw std::runtime_error("height map: bad dims line");
  if (!(is >> key >> res) || key != "resolution") throw std::runtime_error("height map: bad resolution line");
  HeightMap m(frame, rows, cols, res);
  std::string tok;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(is >> tok)) throw std::runtime_error("height map: truncated body");
    if (tok == "nan") continue;
    m.cells[i] = std::stod(tok);
    m.valid[i] = 1;
  }
  return m;
}

}  // namespace duocarry
