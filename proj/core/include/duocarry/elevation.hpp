#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "duocarry/geometry.hpp"
#include "duocarry/terrain.hpp"

namespace duocarry {

/// Grid of heights aligned with `frame`. Rows run along the frame x-axis and
/// columns along its y-axis; cell (r, c) is centered at
///   x = (r - (rows - 1) / 2) * resolution,  y = (c - (cols - 1) / 2) * resolution
/// in frame coordinates. Storage is row-major.
struct HeightMap {
  Pose2 frame;
  int rows = 0;
  int cols = 0;
  double resolution = 0.0;
  std::vector<double> cells;
  std::vector<std::uint8_t> valid;

  HeightMap() = default;
  HeightMap(const Pose2& frame, int rows, int cols, double resolution);

  std::size_t size() const { return cells.size(); }
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c); }
  double& at(int r, int c) { return cells[index(r, c)]; }
  double at(int r, int c) const { return cells[index(r, c)]; }
  bool isValid(int r, int c) const { return valid[index(r, c)] != 0; }

  Vec2 cellCenterLocal(int r, int c) const;
  Vec2 cellCenterWorld(int r, int c) const;
  /// Index of the cell containing a world point, if inside the grid.
  std::optional<std::size_t> cellAt(const Vec2& p_world) const;

  /// Throws std::invalid_argument when dimensions and storage disagree.
  void validate() const;
};

struct SensorConfig {
  double map_size = 8.0;     ///< square side, meters
  double resolution = 0.04;
  double sensor_height = 0.5;
};

/// Ground-truth elevation around an agent with line-of-sight occlusion from a
/// sensor at `sensor_height` above the agent center. A cell is invalid when
/// the sight line to its top is blocked by a taller box. Box tops are not
/// observable except for face cells, whose centers lie inside the box within
/// one cell spacing (per axis) of the point where the sight line enters it.
/// Face cells read the box height. Cells outside the terrain are invalid.
HeightMap sense(const Terrain& terrain, const Pose2& agent_pose, double t, const SensorConfig& cfg = {});

/// Fills invalid cells with the maximum of their valid 8-neighbors, in
/// synchronous waves, until no cell changes. Valid cells are never modified.
HeightMap maxFilter(const HeightMap& m);

struct PolicyMapConfig {
  int rows = 13;   ///< along the object x-axis (4.0 m / 0.3 m, rounded)
  int cols = 20;   ///< along the object y-axis (6.0 m / 0.3 m)
  double resolution = 0.3;
};

/// Resamples both agent maps into a grid centered on and oriented with the
/// object frame. Each output cell takes the maximum over the valid source
/// cells hit by a sub-grid of sample points at the source resolution. Cells
/// no map covers are 0 and flagged invalid.
HeightMap fuse(const HeightMap& m1, const HeightMap& m2, const Pose2& object_frame,
               const PolicyMapConfig& cfg = {});

struct AugmentConfig {
  double noise_std = 0.02;
  double artifact_probability = 0.01;
  double artifact_height = 0.4;
};

/// Spurious bar artifacts (cell raised to at least artifact_height with the
/// given probability) followed by zero-mean Gaussian noise on every cell.
HeightMap augment(const HeightMap& m, const AugmentConfig& cfg, std::uint64_t seed);

/// Portable text grid: header lines then `rows` lines of heights, with
/// invalid cells written as "nan".
std::string heightMapToText(const HeightMap& m);
HeightMap heightMapFromText(std::string_view text);

}  // namespace duocarry
