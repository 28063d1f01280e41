#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "edgefuse/fusion_model.hpp"

namespace edgefuse {

// One mapping robot: a planned route polyline (meters) and the radius its scans
// cover around every route point.
struct RobotSpec {
  int id = 0;
  std::vector<Eigen::Vector2d> route;
  double scan_radius = 1.0;
  std::uint64_t raw_frame_bytes = 0;
  // Local map size in bytes. When absent it is derived from the covered cell
  // count (one byte per known cell) at the scene raster resolution.
  std::optional<double> map_bytes;

  void validate() const;
};

struct EdgeServerSpec {
  int id = 0;
  double compute_scale = 1.0;   // multiplier on the fusion-latency model
  double uplink_bw_robot = 0.0; // bytes/s on the robot->edge link
  double uplink_bw_cloud = 0.0; // bytes/s on the edge->cloud link

  void validate() const;
};

// Set of integer grid cells; stored sorted and unique so set algebra and
// equality are deterministic.
class CellSet {
 public:
  using Cell = std::pair<std::int32_t, std::int32_t>;

  CellSet() = default;
  explicit CellSet(std::vector<Cell> cells);

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::vector<Cell>& cells() const { return cells_; }

  bool operator==(const CellSet&) const = default;

 private:
  std::vector<Cell> cells_;
};

struct Scene {
  std::vector<RobotSpec> robots;
  std::vector<EdgeServerSpec> edges;
  FusionLatencyModel cloud_fusion_model;
  double raster_resolution = 0.05; // meters per cell
  // Direct pairwise overlapping degrees; bypasses route geometry when present.
  std::optional<Eigen::MatrixXd> overlap_matrix;

  void validate() const;
};

std::size_t intersection_size(const CellSet& a, const CellSet& b);

// Cells whose centers fall within scan_radius of the route, the route sampled
// at intervals of scan_radius/2 (segment endpoints always included).
CellSet coverage_region(const RobotSpec& robot, double resolution);

// |a n b| / (|a| + |b|), in [0, 0.5]. Both sets must be nonempty.
double overlap_degree(const CellSet& a, const CellSet& b);

// Symmetric zero-diagonal matrix of pairwise overlap degrees, from
// scene.overlap_matrix when present, otherwise from rasterized coverage.
Eigen::MatrixXd build_overlap_matrix(const Scene& scene);

}  // namespace edgefuse
