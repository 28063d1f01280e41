#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "edgefuse/costmodel.hpp"
#include "edgefuse/offload.hpp"
#include "edgefuse/overlap_graph.hpp"
#include "edgefuse/tabu.hpp"

namespace edgefuse {

struct PipelineOptions {
  bool use_tabu = true;
  int greedy_passes = 1;
};

struct ScheduleResult {
  std::string policy;
  std::uint64_t seed = 0;
  int robot_count = 0;
  int edge_count = 0;
  // Empty for the flat cloud policy, which has no grouping stage.
  std::optional<Grouping> grouping;
  std::optional<Assignment> assignment;
  std::optional<double> fitness;
  TotalLatency latency;
  double max_robot_s = 0.0;  // slowest first-stage delivery (or local SLAM)
  double max_fuse_s = 0.0;   // slowest edge-side fusion; 0 for cloud
  double max_upload_s = 0.0; // slowest map upload toward the cloud
  double sched_wall_ms = 0.0; // wall time of the scheduling stages only
  std::string profile_fingerprint;
  std::optional<double> oracle_total_s; // exhaustive-assignment total, on request
};

// scene.overlap_matrix when present, otherwise rasterized from geometry.
Eigen::MatrixXd resolve_overlap_matrix(const Scene& scene);

// Groups robots by overlap, refines with tabu search, assigns servers
// greedily, then prices the result end to end. Deterministic given the scene.
ScheduleResult run_recslam(const Scene& scene, const CostProfile& profile,
                           const TabuConfig& tabu = {}, std::uint64_t seed = 0,
                           const PipelineOptions& options = {});

// Seeded uniform balanced grouping with a random injective assignment.
ScheduleResult run_random_baseline(const Scene& scene,
                                   const CostProfile& profile,
                                   std::uint64_t seed);

// Random start, then ordered passes of best-improvement cross-group swaps.
ScheduleResult run_greedy_baseline(const Scene& scene,
                                   const CostProfile& profile,
                                   std::uint64_t seed, int passes = 1);

// Flat robot->cloud pipeline; no grouping, no edge servers.
ScheduleResult run_cloud_baseline(const Scene& scene,
                                  const CostProfile& profile);

// Minimum total latency over every injective assignment of the grouping's
// groups; exhaustive, so guarded to small server counts.
double oracle_total_for_grouping(const Scene& scene, const CostProfile& profile,
                                 const Grouping& grouping);

std::string csv_header(bool with_oracle);
// blank_volatile empties the wall-time column so fixed-seed outputs compare
// byte for byte.
std::string to_csv_row(const ScheduleResult& r, bool with_oracle,
                       bool blank_volatile);
std::string json_report(const ScheduleResult& r);

}  // namespace edgefuse
