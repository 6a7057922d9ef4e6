#include "duocarry/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "duocarry/random.hpp"

namespace duocarry {

void TerrainConfig::validate() const {
  if (n_levels < 1) throw std::invalid_argument("n_levels must be >= 1");
  if (!(d_max >= 0.0 && d_max <= 1.0)) throw std::invalid_argument("d_max must lie in [0, 1]");
  if (!(obstacle_height > 0.0)) throw std::invalid_argument("obstacle_height must be positive");
  if (!(size_min > 0.0)) throw std::invalid_argument("size_min must be positive");
  if (size_min > size_max) throw std::invalid_argument("size_min must not exceed size_max");
  if (size_max > subterrain_extent)
    throw std::invalid_argument("obstacles larger than the subterrain extent cannot be placed");
  if (grid_columns < 1) throw std::invalid_argument("grid_columns must be >= 1");
  if (max_placement_attempts < 1) throw std::invalid_argument("max_placement_attempts must be >= 1");
}

Terrain::Terrain(Rect bounds, std::vector<Subterrain> subterrains)
    : bounds_(bounds), subterrains_(std::move(subterrains)) {
  for (const auto& s : subterrains_) {
    all_obstacles_.insert(all_obstacles_.end(), s.obstacles.begin(), s.obstacles.end());
  }
}

namespace {

// Extent swept by a box over [0, t].
Rect sweptExtent(const BoxObstacle& b, double t) {
  const Vec2 c0 = b.centerAt(0.0);
  const Vec2 c1 = b.centerAt(t);
  return {Vec2{std::min(c0.x, c1.x), std::min(c0.y, c1.y)} - b.half_extents,
          Vec2{std::max(c0.x, c1.x), std::max(c0.y, c1.y)} + b.half_extents};
}

}  // namespace

std::vector<BoxObstacle> Terrain::obstaclesNear(const Rect& region, double t) const {
  std::vector<BoxObstacle> out;
  for (const auto& b : all_obstacles_) {
    if (sweptExtent(b, t).intersects(region)) out.push_back(b);
  }
  return out;
}

std::optional<std::size_t> Terrain::subterrainAt(const Vec2& p) const {
  for (std::size_t i = 0; i < subterrains_.size(); ++i) {
    if (subterrains_[i].bounds.contains(p)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Terrain::subterrainForLevel(int level) const {
  for (std::size_t i = 0; i < subterrains_.size(); ++i) {
    if (subterrains_[i].level == level) return i;
  }
  return std::nullopt;
}

std::optional<double> Terrain::heightAt(const Vec2& p, double t) const {
  if (!bounds_.contains(p)) return std::nullopt;
  double h = 0.0;
  for (const auto& b : all_obstacles_) {
    if (pointBoxDistance(p, b, t) < 0.0) h = std::max(h, b.height);
  }
  return h;
}

std::optional<bool> Terrain::occupied(const Vec2& p, double t) const {
  const auto h = heightAt(p, t);
  if (!h) return std::nullopt;
  return *h > 0.0;
}

namespace {

bool sameBox(const BoxObstacle& a, const BoxObstacle& b) {
  return a.center == b.center && a.half_extents == b.half_extents && a.height == b.height &&
         a.velocity == b.velocity && a.motion_end == b.motion_end;
}

}  // namespace

bool Terrain::operator==(const Terrain& o) const {
  if (!(bounds_ == o.bounds_) || subterrains_.size() != o.subterrains_.size()) return false;
  for (std::size_t i = 0; i < subterrains_.size(); ++i) {
    const auto& a = subterrains_[i];
    const auto& b = o.subterrains_[i];
    if (a.level != b.level || !(a.bounds == b.bounds) || a.difficulty != b.difficulty ||
        a.obstacles.size() != b.obstacles.size())
      return false;
    for (std::size_t k = 0; k < a.obstacles.size(); ++k) {
      if (!sameBox(a.obstacles[k], b.obstacles[k])) return false;
    }
  }
  return true;
}

double levelDifficulty(const TerrainConfig& cfg, int level) {
  if (cfg.n_levels <= 1) return 0.0;
  return static_cast<double>(level) / static_cast<double>(cfg.n_levels - 1) * cfg.d_max;
}

namespace {

// Side lengths with the requested area, both inside [s_min, s_max].
Vec2 dimsForArea(Rng& rng, double area, double s_min, double s_max) {
  const double lo = std::max(s_min, area / s_max);
  const double hi = std::min(s_max, area / s_min);
  const double w = hi > lo ? rng.uniform(lo, hi) : lo;
  return {w, area / w};
}

bool overlapsAny(const BoxObstacle& box, const std::vector<BoxObstacle>& placed) {
  for (const auto& o : placed) {
    const Vec2 d = box.center - o.center;
    if (std::abs(d.x) < box.half_extents.x + o.half_extents.x &&
        std::abs(d.y) < box.half_extents.y + o.half_extents.y)
      return true;
  }
  return false;
}

std::vector<BoxObstacle> placeObstacles(const TerrainConfig& cfg, const Rect& bounds, double difficulty,
                                        Rng& rng) {
  std::vector<BoxObstacle> boxes;
  const double target = difficulty * bounds.area();
  const double a_min = cfg.size_min * cfg.size_min;
  const double a_max = cfg.size_max * cfg.size_max;
  double placed = 0.0;
  while (target - placed > 1e-9 * std::max(target, 1.0)) {
    const double remaining = target - placed;
    Vec2 dims{rng.uniform(cfg.size_min, cfg.size_max), rng.uniform(cfg.size_min, cfg.size_max)};
    double area = dims.x * dims.y;
    // Trim the last boxes so the covered area lands on the target instead of
    // overshooting by up to a full obstacle.
    if (remaining < a_min) {
      dims = {cfg.size_min, cfg.size_min};
    } else if (area >= remaining || remaining - area < a_min) {
      area = remaining <= a_max ? remaining : std::clamp(remaining - a_min, a_min, a_max);
      dims = dimsForArea(rng, area, cfg.size_min, cfg.size_max);
    }

    BoxObstacle box;
    box.half_extents = dims * 0.5;
    box.height = cfg.obstacle_height;
    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_placement_attempts; ++attempt) {
      box.center = {rng.uniform(bounds.lo.x + box.half_extents.x, bounds.hi.x - box.half_extents.x),
                    rng.uniform(bounds.lo.y + box.half_extents.y, bounds.hi.y - box.half_extents.y)};
      if (!overlapsAny(box, boxes)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::runtime_error("obstacle placement exhausted its attempt budget");
    boxes.push_back(box);
    placed += box.area();
  }
  return boxes;
}

}  // namespace

Terrain generateTerrain(const TerrainConfig& cfg) {
  cfg.validate();
  const double e = cfg.subterrain_extent;
  const int rows = (cfg.n_levels + cfg.grid_columns - 1) / cfg.grid_columns;
  const int cols = std::min(cfg.n_levels, cfg.grid_columns);
  std::vector<Subterrain> subs;
  subs.reserve(static_cast<std::size_t>(cfg.n_levels));
  for (int level = 0; level < cfg.n_levels; ++level) {
    Subterrain s;
    s.level = level;
    const int r = level / cfg.grid_columns;
    const int c = level % cfg.grid_columns;
    s.bounds = {Vec2{c * e, r * e}, Vec2{(c + 1) * e, (r + 1) * e}};
    s.difficulty = levelDifficulty(cfg, level);
    Rng rng(deriveSeed(cfg.rng_seed, static_cast<std::uint64_t>(level)));
    s.obstacles = placeObstacles(cfg, s.bounds, s.difficulty, rng);
    subs.push_back(std::move(s));
  }
  return Terrain(Rect{Vec2{0.0, 0.0}, Vec2{cols * e, rows * e}}, std::move(subs));
}

std::string_view scenarioName(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Empty: return "empty";
    case ScenarioKind::Corridor: return "corridor";
    case ScenarioKind::Boxes: return "boxes";
  }
  return "unknown";
}

ScenarioKind parseScenario(std::string_view name) {
  if (name == "empty") return ScenarioKind::Empty;
  if (name == "corridor") return ScenarioKind::Corridor;
  if (name == "boxes") return ScenarioKind::Boxes;
  throw std::invalid_argument("unknown scenario: " + std::string(name));
}

Scenario makeScenario(ScenarioKind kind, bool dynamic) {
  constexpr double kPairX = 3.0;
  constexpr double kHalf = 0.75;  // 1.5 m boxes
  constexpr double kHeight = 1.0;
  const Rect bounds{Vec2{-2.5, -3.5}, Vec2{10.0, 6.5}};

  auto box_at = [&](Vec2 c) {
    BoxObstacle b;
    b.center = c;
    b.half_extents = {kHalf, kHalf};
    b.height = kHeight;
    return b;
  };

  Scenario sc;
  sc.kind = kind;
  sc.dynamic = dynamic;
  sc.start = Pose2{{0.0, 0.0}, 0.0};
  if (dynamic && kind != ScenarioKind::Boxes)
    throw std::invalid_argument("the moving obstacle variant exists only for the boxes scenario");

  std::vector<BoxObstacle> boxes;
  const Vec2 wp1{kPairX, 0.0};
  const double diag = 5.5 * std::cos(std::numbers::pi / 4.0);
  const Vec2 wp2 = wp1 + Vec2{diag, diag};
  switch (kind) {
    case ScenarioKind::Empty:
      sc.waypoints = {wp1, wp2};
      break;
    case ScenarioKind::Corridor: {
      const double gap = 2.0;
      boxes.push_back(box_at({kPairX, -(gap / 2 + kHalf)}));
      boxes.push_back(box_at({kPairX, gap / 2 + kHalf}));
      sc.waypoints = {Vec2{7.0, 0.0}};
      break;
    }
    case ScenarioKind::Boxes: {
      const double gap = 2.5;
      boxes.push_back(box_at({kPairX, -(gap / 2 + kHalf)}));
      boxes.push_back(box_at({kPairX, gap / 2 + kHalf}));
      BoxObstacle third = box_at({kPairX + 2.5, 0.0});
      if (dynamic) {
        constexpr double kSpeed = 0.1;
        third.center = {kPairX + 2.5, -1.25};
        third.velocity = {0.0, kSpeed};
        third.motion_end = 2.5 / kSpeed;
      }
      boxes.push_back(third);
      sc.waypoints = {wp1, wp2};
      break;
    }
  }
  Subterrain sub;
  sub.level = 0;
  sub.bounds = bounds;
  sub.difficulty = 0.0;
  sub.obstacles = std::move(boxes);
  sc.terrain = Terrain(bounds, {sub});
  return sc;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson vecJson(const Vec2& v) { return ojson::array({v.x, v.y}); }

Vec2 vecFrom(const ojson& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("expected a 2-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string terrainToJson(const Terrain& terrain) {
  ojson root;
  root["format"] = "duocarry-terrain";
  root["version"] = 1;
  root["bounds"] = {{"lo", vecJson(terrain.bounds().lo)}, {"hi", vecJson(terrain.bounds().hi)}};
  ojson subs = ojson::array();
  for (const auto& s : terrain.subterrains()) {
    ojson js;
    js["level"] = s.level;
    js["difficulty"] = s.difficulty;
    js["bounds"] = {{"lo", vecJson(s.bounds.lo)}, {"hi", vecJson(s.bounds.hi)}};
    ojson obs = ojson::array();
    for (const auto& b : s.obstacles) {
      ojson jb;
      jb["center"] = vecJson(b.center);
      jb["half_extents"] = vecJson(b.half_extents);
      jb["height"] = b.height;
      jb["velocity"] = vecJson(b.velocity);
      if (std::isfinite(b.motion_end)) jb["motion_end"] = b.motion_end;
      obs.push_back(std::move(jb));
    }
    js["obstacles"] = std::move(obs);
    subs.push_back(std::move(js));
  }
  root["subterrains"] = std::move(subs);
  return root.dump(2) + "\n";
}

Terrain terrainFromJson(std::string_view text) {
  try {
    const ojson root = ojson::parse(text);
    if (root.at("format").get<std::string>() != "duocarry-terrain")
      throw std::runtime_error("not a terrain file");
    if (root.at("version").get<int>() != 1) throw std::runtime_error("unsupported terrain version");
    const Rect bounds{vecFrom(root.at("bounds").at("lo")), vecFrom(root.at("bounds").at("hi"))};
    std::vector<Subterrain> subs;
    for (const auto& js : root.at("subterrains")) {
      Subterrain s;
      s.level = js.at("level").get<int>();
      s.difficulty = js.at("difficulty").get<double>();
      s.bounds = {vecFrom(js.at("bounds").at("lo")), vecFrom(js.at("bounds").at("hi"))};
      for (const auto& jb : js.at("obstacles")) {
        BoxObstacle b;
        b.center = vecFrom(jb.at("center"));
        b.half_extents = vecFrom(jb.at("half_extents"));
        b.height = jb.at("height").get<double>();
        b.velocity = vecFrom(jb.at("velocity"));
        if (jb.contains("motion_end")) b.motion_end = jb.at("motion_end").get<double>();
        b.validate();
        s.obstacles.push_back(b);
      }
      subs.push_back(std::move(s));
    }
    return Terrain(bounds, std::move(subs));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed terrain file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid terrain file: ") + e.what());
  }
}

}  // namespace duocarry
