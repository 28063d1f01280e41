#include "edgefuse/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "edgefuse/detail/format.hpp"
#include "edgefuse/detail/rng.hpp"
#include "edgefuse/grouping.hpp"

namespace edgefuse {

namespace {

using detail::SplitMix64;
using detail::shuffle_indices;

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

Grouping random_balanced_grouping(int vertex_count, int group_count,
                                  SplitMix64& rng) {
  std::vector<int> order(vertex_count);
  std::iota(order.begin(), order.end(), 0);
  shuffle_indices(order, rng);
  Grouping p;
  p.group_count = group_count;
  p.assignment.resize(vertex_count);
  for (int k = 0; k < vertex_count; ++k)
    p.assignment[order[k]] = k % group_count;
  return p;
}

int planned_group_count(const Scene& scene) {
  return static_cast<int>(
      std::min(scene.edges.size(), scene.robots.size()));
}

GroupLatencyFn make_latency_fn(const Scene& scene, const CostProfile& profile) {
  return [&scene, &profile](std::span<const int> group, const EdgeServerSpec& e) {
    return edge_latency(group, e, scene, profile.params, profile.edge_fusion);
  };
}

// Shared tail: price the grouping+assignment end to end and fill the result.
ScheduleResult finish_result(std::string policy, std::uint64_t seed,
                             const Scene& scene, const CostProfile& profile,
                             const OverlapGraph& graph, Grouping grouping,
                             Assignment assignment, double wall_ms) {
  ScheduleResult r;
  r.policy = std::move(policy);
  r.seed = seed;
  r.robot_count = static_cast<int>(scene.robots.size());
  r.edge_count = static_cast<int>(scene.edges.size());
  r.fitness = fitness(graph, grouping);
  r.sched_wall_ms = wall_ms;
  r.profile_fingerprint = profile.fingerprint();

  const auto groups = grouping.groups();
  const MapSizeModel sizes = make_size_model(scene, resolve_overlap_matrix(scene));
  r.latency = total_latency(groups, assignment.server_ids, scene, profile.params,
                            profile.edge_fusion, sizes);
  for (const auto& path : r.latency.paths) {
    r.max_robot_s = std::max(r.max_robot_s, path.robot_max_s);
    r.max_fuse_s = std::max(r.max_fuse_s, path.fuse_s);
    r.max_upload_s = std::max(r.max_upload_s, path.upload_s);
  }
  r.grouping = std::move(grouping);
  r.assignment = std::move(assignment);
  return r;
}

}  // namespace

Eigen::MatrixXd resolve_overlap_matrix(const Scene& scene) {
  return build_overlap_matrix(scene);
}

ScheduleResult run_recslam(const Scene& scene, const CostProfile& profile,
                           const TabuConfig& tabu, std::uint64_t seed,
                           const PipelineOptions& options) {
  scene.validate();
  profile.validate();
  const Eigen::MatrixXd matrix = resolve_overlap_matrix(scene);
  const OverlapGraph graph = OverlapGraph::from_matrix(matrix);
  const MapSizeModel sizes{resolve_map_sizes(scene), matrix};
  const int n_groups = planned_group_count(scene);

  const auto start = Clock::now();
  Grouping grouping = initial_grouping(graph, n_groups);
  if (options.use_tabu) grouping = tabu_optimize(graph, grouping, tabu);
  Assignment assignment = assign_servers(
      grouping.groups(), scene.edges, make_latency_fn(scene, profile),
      [&sizes](std::span<const int> group) { return sizes.group_output_bytes(group); });
  const auto stop = Clock::now();

  Scene cached = scene;
  cached.overlap_matrix = matrix;
  return finish_result("recslam", seed, cached, profile, graph,
                       std::move(grouping), std::move(assignment),
                       ms_between(start, stop));
}

ScheduleResult run_random_baseline(const Scene& scene,
                                   const CostProfile& profile,
                                   std::uint64_t seed) {
  scene.validate();
  profile.validate();
  const Eigen::MatrixXd matrix = resolve_overlap_matrix(scene);
  const OverlapGraph graph = OverlapGraph::from_matrix(matrix);
  const int n_groups = planned_group_count(scene);
  SplitMix64 rng = detail::seeded_stream(seed);

  const auto start = Clock::now();
  Grouping grouping =
      random_balanced_grouping(graph.vertex_count(), n_groups, rng);
  std::vector<int> order(scene.edges.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle_indices(order, rng);
  Assignment assignment;
  for (int i = 0; i < n_groups; ++i)
    assignment.server_ids.push_back(scene.edges[order[i]].id);
  const auto stop = Clock::now();

  Scene cached = scene;
  cached.overlap_matrix = matrix;
  return finish_result("random", seed, cached, profile, graph,
                       std::move(grouping), std::move(assignment),
                       ms_between(start, stop));
}

ScheduleResult run_greedy_baseline(const Scene& scene,
                                   const CostProfile& profile,
                                   std::uint64_t seed, int passes) {
  scene.validate();
  profile.validate();
  if (passes < 1)
    throw std::invalid_argument("greedy baseline: passes must be >= 1");
  const Eigen::MatrixXd matrix = resolve_overlap_matrix(scene);
  const OverlapGraph graph = OverlapGraph::from_matrix(matrix);
  const MapSizeModel sizes{resolve_map_sizes(scene), matrix};
  const int v_count = graph.vertex_count();
  const int n_groups = planned_group_count(scene);
  SplitMix64 rng = detail::seeded_stream(seed);

  const auto start = Clock::now();
  Grouping grouping = random_balanced_grouping(v_count, n_groups, rng);

  auto weight_into_groups = [&](int v) {
    std::vector<double> w(n_groups, 0.0);
    for (const auto& [u, wt] : graph.adjacency(v)) w[grouping.assignment[u]] += wt;
    return w;
  };
  for (int pass = 0; pass < passes; ++pass) {
    for (int v = 0; v < v_count; ++v) {
      const std::vector<double> wv = weight_into_groups(v);
      const int gv = grouping.assignment[v];
      int best_u = -1;
      double best_delta = 0.0;
      for (int u = 0; u < v_count; ++u) {
        const int gu = grouping.assignment[u];
        if (gu == gv) continue;
        const std::vector<double> wu = weight_into_groups(u);
        const double delta = wu[gu] - wu[gv] + wv[gv] - wv[gu] +
                             2.0 * graph.weight(u, v);
        if (delta < best_delta) {
          best_delta = delta;
          best_u = u;
        }
      }
      // Apply only strict improvements; ties keep the current grouping.
      if (best_u >= 0 && best_delta < 0.0)
        std::swap(grouping.assignment[v], grouping.assignment[best_u]);
    }
  }
  Assignment assignment = assign_servers(
      grouping.groups(), scene.edges, make_latency_fn(scene, profile),
      [&sizes](std::span<const int> group) { return sizes.group_output_bytes(group); });
  const auto stop = Clock::now();

  Scene cached = scene;
  cached.overlap_matrix = matrix;
  return finish_result("greedy", seed, cached, profile, graph,
                       std::move(grouping), std::move(assignment),
                       ms_between(start, stop));
}

ScheduleResult run_cloud_baseline(const Scene& scene,
                                  const CostProfile& profile) {
  scene.validate();
  profile.validate();
  const Eigen::MatrixXd matrix = resolve_overlap_matrix(scene);
  Scene cached = scene;
  cached.overlap_matrix = matrix;
  cached.cloud_fusion_model = scene.cloud_fusion_model;
  const MapSizeModel sizes{resolve_map_sizes(scene), matrix};
  const CloudBaseline base =
      cloud_baseline_latency(cached, profile.params, sizes);

  ScheduleResult r;
  r.policy = "cloud";
  r.seed = 0;
  r.robot_count = static_cast<int>(scene.robots.size());
  r.edge_count = static_cast<int>(scene.edges.size());
  r.latency.bottleneck_path_s = base.bottleneck_path_s;
  r.latency.cloud_fuse_s = base.cloud_fuse_s;
  r.latency.total_s = base.total_s;
  r.max_robot_s = base.max_local_s;
  r.max_fuse_s = 0.0;
  r.max_upload_s = base.max_upload_s;
  r.sched_wall_ms = 0.0;
  r.profile_fingerprint = profile.fingerprint();
  return r;
}

double oracle_total_for_grouping(const Scene& scene, const CostProfile& profile,
                                 const Grouping& grouping) {
  const Eigen::MatrixXd matrix = resolve_overlap_matrix(scene);
  Scene cached = scene;
  cached.overlap_matrix = matrix;
  const MapSizeModel sizes{resolve_map_sizes(scene), matrix};
  const auto groups = grouping.groups();
  const OracleResult best = oracle_optimal_assignment(
      groups.size(), scene.edges, [&](const Assignment& a) {
        return total_latency(groups, a.server_ids, cached, profile.params,
                             profile.edge_fusion, sizes)
            .total_s;
      });
  return best.total_latency_s;
}

std::string csv_header(bool with_oracle) {
  std::string h =
      "policy,seed,robots,edges,groups,fitness,total_latency_s,"
      "bottleneck_path_s,cloud_fuse_s,max_robot_s,max_edge_fuse_s,"
      "max_upload_s,sched_wall_ms,profile_id";
  if (with_oracle) h += ",oracle_total_s,oracle_gap_s";
  return h;
}

std::string to_csv_row(const ScheduleResult& r, bool with_oracle,
                       bool blank_volatile) {
  using detail::format_double;
  std::string row = r.policy;
  row += "," + std::to_string(r.seed);
  row += "," + std::to_string(r.robot_count);
  row += "," + std::to_string(r.edge_count);
  row += "," + std::to_string(r.grouping ? r.grouping->group_count : 0);
  row += ",";
  if (r.fitness) row += format_double(*r.fitness);
  row += "," + format_double(r.latency.total_s);
  row += "," + format_double(r.latency.bottleneck_path_s);
  row += "," + format_double(r.latency.cloud_fuse_s);
  row += "," + format_double(r.max_robot_s);
  row += "," + format_double(r.max_fuse_s);
  row += "," + format_double(r.max_upload_s);
  row += ",";
  if (!blank_volatile) row += format_double(r.sched_wall_ms);
  row += "," + r.profile_fingerprint;
  if (with_oracle) {
    row += ",";
    if (r.oracle_total_s) row += format_double(*r.oracle_total_s);
    row += ",";
    if (r.oracle_total_s)
      row += format_double(r.latency.total_s - *r.oracle_total_s);
  }
  return row;
}

std::string json_report(const ScheduleResult& r) {
  nlohmann::json j;
  j["policy"] = r.policy;
  j["seed"] = r.seed;
  j["robots"] = r.robot_count;
  j["edges"] = r.edge_count;
  if (r.grouping) j["groups"] = r.grouping->groups();
  if (r.assignment) j["assignment"] = r.assignment->server_ids;
  if (r.fitness) j["fitness"] = *r.fitness;
  j["total_latency_s"] = r.latency.total_s;
  j["bottleneck_path_s"] = r.latency.bottleneck_path_s;
  j["cloud_fuse_s"] = r.latency.cloud_fuse_s;
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : r.latency.paths) {
    paths.push_back({{"group", p.group_index},
                     {"server", p.server_id},
                     {"robot_max_s", p.robot_max_s},
                     {"fuse_s", p.fuse_s},
                     {"upload_s", p.upload_s},
                     {"output_bytes", p.output_bytes},
                     {"path_s", p.path_s}});
  }
  j["paths"] = std::move(paths);
  j["sched_wall_ms"] = r.sched_wall_ms;
  j["profile_id"] = r.profile_fingerprint;
  if (r.oracle_total_s) j["oracle_total_s"] = *r.oracle_total_s;
  return j.dump(2);
}

}  // namespace edgefuse
