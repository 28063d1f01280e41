#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "edgefuse/fusion_model.hpp"

namespace edgefuse {

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

// Axis-aligned occupancy grid. origin is the world position of the lower-left
// corner of cell (0, 0); cell (x, y) spans
// [origin + (x, y)*res, origin + (x+1, y+1)*res).
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution,
                const Eigen::Vector2d& origin,
                CellState fill = CellState::Unknown);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector2d& origin() const { return origin_; }

  CellState at(int x, int y) const;
  void set(int x, int y, CellState s);
  const std::vector<CellState>& cells() const { return cells_; }

  // Same dimensions, resolution and cell contents; origin is ignored.
  bool content_equals(const OccupancyGrid& other) const;

  bool operator==(const OccupancyGrid&) const = default;

 private:
  std::size_t index(int x, int y) const;

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.05;
  Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
  std::vector<CellState> cells_;
};

struct ComposeStats {
  std::size_t pairwise_checks = 0;    // always k*(k-1)/2 for k inputs
  std::size_t overlapping_pairs = 0;  // pairs sharing at least one known cell
  std::size_t component_count = 0;    // connected components of that relation
};

// Merges maps of equal resolution onto the union bounding box. Cell conflicts
// resolve as Occupied > Free > Unknown. Origin offsets snap to the nearest
// whole cell.
OccupancyGrid compose(std::span<const OccupancyGrid> maps,
                      ComposeStats* stats = nullptr);

// Count of known (non-Unknown) cells, one byte per cell.
std::size_t known_size_bytes(const OccupancyGrid& m);

// Cells known in both maps, counted over the overlapping region.
std::size_t known_intersection_cells(const OccupancyGrid& a,
                                     const OccupancyGrid& b);

// known-intersection / (known(a) + known(b)), the measured analogue of the
// planning-time overlap degree.
double measured_overlap_degree(const OccupancyGrid& a, const OccupancyGrid& b);

// Binary PGM (P5, maxval 255): 0 = occupied, 254 = free, 205 = unknown.
// A YAML sidecar next to the image carries resolution and origin.
void write_pgm(const OccupancyGrid& m, const std::filesystem::path& pgm_path);
OccupancyGrid read_pgm(const std::filesystem::path& pgm_path);

// Deterministic profiling fixture: k heavily overlapping room maps whose
// pairwise alignment scans dominate compose time quadratically in k.
std::vector<OccupancyGrid> make_profiling_fixture(int k);

struct FusionProfile {
  std::vector<std::pair<int, double>> samples; // (k, seconds), all repetitions
  FusionLatencyModel model;
  double r_squared = 0.0;
};

using FixtureGeneratorFn = std::function<std::vector<OccupancyGrid>(int)>;

// Times compose() over the given map counts and fits the quadratic latency
// model. Needs at least three distinct counts.
FusionProfile profile_fusion(std::span<const int> map_counts,
                             const FixtureGeneratorFn& fixture,
                             int repetitions);

}  // namespace edgefuse
