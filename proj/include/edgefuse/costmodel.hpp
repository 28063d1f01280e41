#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "edgefuse/fusion_model.hpp"
#include "edgefuse/scene.hpp"

namespace edgefuse {

// Link and timing constants shared by every policy in a comparison run.
struct CostParams {
  double t_pack_s = 0.0;             // on-robot packing time per frame
  double t_frame_s = 0.0;            // on-edge frame transformation time
  double robot_uplink_bw = 0.0;      // bytes/s the robot radio can sustain
  double local_slam_latency_s = 0.0; // on-robot SLAM latency (cloud baseline)
  double cloud_uplink_bw_robot = 0.0; // bytes/s robot->cloud WAN share

  void validate() const;
};

// Named preset: link constants plus the fitted fusion-latency model.
struct CostProfile {
  std::string name;
  CostParams params;
  FusionLatencyModel edge_fusion;
  double cloud_compute_scale = 0.25; // cloud speedup factor over a unit edge

  FusionLatencyModel cloud_fusion() const { return edge_fusion.scaled(cloud_compute_scale); }
  // Stable digest of every numeric field; runs compared against each other
  // must carry the same fingerprint.
  std::string fingerprint() const;

  void validate() const;
};

struct QuadraticFit {
  FusionLatencyModel model;
  double r_squared = 0.0;
};

// Least-squares fit of t(k) = alpha*k^2 + beta*k + gamma over (k, seconds)
// samples; needs at least three distinct k values. Coefficients are nudged
// minimally when the raw fit would dip below zero at some k >= 1.
QuadraticFit fit_fusion_model(std::span<const std::pair<int, double>> samples);

// Per-robot map sizes in bytes: explicit map_bytes when given, otherwise the
// covered cell count at the scene raster resolution, one byte per cell.
std::vector<double> resolve_map_sizes(const Scene& scene);

// First-order inclusion-exclusion estimate of the fused output size of a
// group: sum of sizes minus the pairwise shared portions, clamped to
// [largest single map, sum of all maps].
double estimate_group_output_size(std::span<const int> group,
                                  std::span<const double> map_bytes,
                                  const Eigen::MatrixXd& degrees);

// Sizes + degrees bundled so schedulers can price group uploads.
struct MapSizeModel {
  std::vector<double> map_bytes;
  Eigen::MatrixXd degrees;

  double group_output_bytes(std::span<const int> group) const {
    return estimate_group_output_size(group, map_bytes, degrees);
  }
};

MapSizeModel make_size_model(const Scene& scene, const Eigen::MatrixXd& degrees);

// Pack + transfer + transform time for one robot's frame stream into an edge
// server; the transfer runs at the slower end of the link.
double robot_map_latency(const RobotSpec& r, const EdgeServerSpec& e,
                         const CostParams& p);

double predict_fusion_latency(const FusionLatencyModel& m, int map_count,
                              double compute_scale);

// Slowest member's delivery plus preparative fusion of the whole group.
double edge_latency(std::span<const int> group, const EdgeServerSpec& e,
                    const Scene& scene, const CostParams& p,
                    const FusionLatencyModel& edge_fusion);

struct EdgePathCost {
  int group_index = 0;
  int server_id = 0;
  double robot_max_s = 0.0;  // slowest robot->edge delivery in the group
  double fuse_s = 0.0;       // preparative fusion on the edge
  double upload_s = 0.0;     // edge map upload to the cloud
  double output_bytes = 0.0; // estimated edge map size
  double path_s = 0.0;       // robot_max_s + fuse_s + upload_s
};

struct TotalLatency {
  std::vector<EdgePathCost> paths;
  double bottleneck_path_s = 0.0; // slowest edge path
  double cloud_fuse_s = 0.0;      // global fusion of all edge maps
  double total_s = 0.0;
};

// End-to-end latency of a grouping mapped onto distinct servers:
// max over edges of (slowest robot + edge fusion + upload) plus cloud fusion
// of one map per group. server_for_group[i] is the server id of group i.
TotalLatency total_latency(std::span<const std::vector<int>> groups,
                           std::span<const int> server_for_group,
                           const Scene& scene, const CostParams& p,
                           const FusionLatencyModel& edge_fusion,
                           const MapSizeModel& sizes);

struct CloudBaseline {
  double max_local_s = 0.0;  // slowest on-robot SLAM
  double max_upload_s = 0.0; // slowest robot map upload over the WAN
  double bottleneck_path_s = 0.0; // slowest local + upload path
  double cloud_fuse_s = 0.0;      // fusion of one map per robot
  double total_s = 0.0;
};

// Flat robot->cloud pipeline: every robot runs SLAM locally and uploads its
// own map; the cloud fuses one map per robot.
CloudBaseline cloud_baseline_latency(const Scene& scene, const CostParams& p,
                                     const MapSizeModel& sizes);

}  // namespace edgefuse
