#include "edgefuse/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Dense>

namespace edgefuse {

void CostParams::validate() const {
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string("cost params: ") + what + " must be > 0");
  };
  auto nonneg = [](double x, const char* what) {
    if (x < 0.0 || !std::isfinite(x))
      throw std::invalid_argument(std::string("cost params: ") + what + " must be >= 0");
  };
  nonneg(t_pack_s, "t_pack_s");
  nonneg(t_frame_s, "t_frame_s");
  positive(robot_uplink_bw, "robot_uplink_bw");
  nonneg(local_slam_latency_s, "local_slam_latency_s");
  positive(cloud_uplink_bw_robot, "cloud_uplink_bw_robot");
}

void CostProfile::validate() const {
  params.validate();
  edge_fusion.validate();
  if (!(cloud_compute_scale > 0.0) || !std::isfinite(cloud_compute_scale))
    throw std::invalid_argument("cost profile: cloud_compute_scale must be > 0");
}

std::string CostProfile::fingerprint() const {
  // FNV-1a over the exact bit patterns of every numeric field.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double x) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(params.t_pack_s);
  mix(params.t_frame_s);
  mix(params.robot_uplink_bw);
  mix(params.local_slam_latency_s);
  mix(params.cloud_uplink_bw_robot);
  mix(edge_fusion.alpha);
  mix(edge_fusion.beta);
  mix(edge_fusion.gamma);
  mix(cloud_compute_scale);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

QuadraticFit fit_fusion_model(std::span<const std::pair<int, double>> samples) {
  std::unordered_set<int> distinct;
  for (const auto& [k, t] : samples) {
    if (k < 1) throw std::invalid_argument("fusion fit: map counts must be >= 1");
    if (!std::isfinite(t) || t < 0.0)
      throw std::invalid_argument("fusion fit: latencies must be finite and >= 0");
    distinct.insert(k);
  }
  if (distinct.size() < 3)
    throw std::invalid_argument("fusion fit: needs at least three distinct map counts");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = static_cast<double>(samples[i].first);
    a(i, 0) = k * k;
    a(i, 1) = k;
    a(i, 2) = 1.0;
    y(i) = samples[i].second;
  }
  Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);

  FusionLatencyModel model{c(0), c(1), c(2)};
  // Smallest adjustments that keep the model physical: a convex trend and no
  // negative prediction at any count >= 1 (the integer minimum sits at k = 1
  // or next to the parabola vertex).
  if (model.alpha < 0.0) model.alpha = 0.0;
  if (model.alpha == 0.0 && model.beta < 0.0) model.beta = 0.0;
  double min_pred = model.predict(1, 1.0);
  if (model.alpha > 0.0) {
    const double vertex = -model.beta / (2.0 * model.alpha);
    for (double kf : {std::floor(vertex), std::ceil(vertex)}) {
      const int k = static_cast<int>(kf);
      if (k >= 1) min_pred = std::min(min_pred, model.predict(k, 1.0));
    }
  }
  if (min_pred < 0.0) model.gamma -= min_pred;

  const double mean = y.mean();
  double ss_tot = 0.0, ss_res = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = static_cast<double>(samples[i].first);
    const double pred = model.alpha * k * k + model.beta * k + model.gamma;
    ss_res += (y(i) - pred) * (y(i) - pred);
    ss_tot += (y(i) - mean) * (y(i) - mean);
  }
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  model.validate();
  return QuadraticFit{model, r2};
}

std::vector<double> resolve_map_sizes(const Scene& scene) {
  std::vector<double> sizes;
  sizes.reserve(scene.robots.size());
  for (const auto& r : scene.robots) {
    if (r.map_bytes) {
      sizes.push_back(*r.map_bytes);
    } else {
      sizes.push_back(
          static_cast<double>(coverage_region(r, scene.raster_resolution).size()));
    }
  }
  return sizes;
}

double estimate_group_output_size(std::span<const int> group,
                                  std::span<const double> map_bytes,
                                  const Eigen::MatrixXd& degrees) {
  if (group.empty())
    throw std::invalid_argument("output size estimate: group must not be empty");
  double sum = 0.0, largest = 0.0;
  for (int r : group) {
    if (r < 0 || static_cast<std::size_t>(r) >= map_bytes.size())
      throw std::invalid_argument("output size estimate: robot index out of range");
    sum += map_bytes[r];
    largest = std::max(largest, map_bytes[r]);
  }
  double shared = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i)
    for (std::size_t j = i + 1; j < group.size(); ++j)
      shared += degrees(group[i], group[j]) * (map_bytes[group[i]] + map_bytes[group[j]]);
  return std::clamp(sum - shared, largest, sum);
}

MapSizeModel make_size_model(const Scene& scene, const Eigen::MatrixXd& degrees) {
  return MapSizeModel{resolve_map_sizes(scene), degrees};
}

double robot_map_latency(const RobotSpec& r, const EdgeServerSpec& e,
                         const CostParams& p) {
  p.validate();
  r.validate();
  e.validate();
  const double link_bw = std::min(p.robot_uplink_bw, e.uplink_bw_robot);
  return p.t_pack_s + static_cast<double>(r.raw_frame_bytes) / link_bw + p.t_frame_s;
}

double predict_fusion_latency(const FusionLatencyModel& m, int map_count,
                              double compute_scale) {
  return m.predict(map_count, compute_scale);
}

double edge_latency(std::span<const int> group, const EdgeServerSpec& e,
                    const Scene& scene, const CostParams& p,
                    const FusionLatencyModel& edge_fusion) {
  if (group.empty())
    throw std::invalid_argument("edge latency: group must not be empty");
  double slowest = 0.0;
  for (int r : group) {
    if (r < 0 || static_cast<std::size_t>(r) >= scene.robots.size())
      throw std::invalid_argument("edge latency: robot index out of range");
    slowest = std::max(slowest, robot_map_latency(scene.robots[r], e, p));
  }
  return slowest +
         edge_fusion.predict(static_cast<int>(group.size()), e.compute_scale);
}

TotalLatency total_latency(std::span<const std::vector<int>> groups,
                           std::span<const int> server_for_group,
                           const Scene& scene, const CostParams& p,
                           const FusionLatencyModel& edge_fusion,
                           const MapSizeModel& sizes) {
  if (groups.empty())
    throw std::invalid_argument("total latency: needs at least one group");
  if (server_for_group.size() != groups.size())
    throw std::invalid_argument("total latency: every group needs a server");
  std::unordered_set<int> used;
  auto find_server = [&](int id) -> const EdgeServerSpec& {
    for (const auto& e : scene.edges)
      if (e.id == id) return e;
    throw std::invalid_argument("total latency: unknown server id " + std::to_string(id));
  };

  TotalLatency out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const int sid = server_for_group[i];
    if (!used.insert(sid).second)
      throw std::invalid_argument("total latency: server " + std::to_string(sid) +
                                  " assigned twice");
    const EdgeServerSpec& e = find_server(sid);

    EdgePathCost path;
    path.group_index = static_cast<int>(i);
    path.server_id = sid;
    for (int r : groups[i])
      path.robot_max_s =
          std::max(path.robot_max_s, robot_map_latency(scene.robots.at(r), e, p));
    if (groups[i].empty())
      throw std::invalid_argument("total latency: empty group");
    path.fuse_s =
        edge_fusion.predict(static_cast<int>(groups[i].size()), e.compute_scale);
    path.output_bytes = sizes.group_output_bytes(groups[i]);
    path.upload_s = path.output_bytes / e.uplink_bw_cloud;
    path.path_s = path.robot_max_s + path.fuse_s + path.upload_s;
    out.bottleneck_path_s = std::max(out.bottleneck_path_s, path.path_s);
    out.paths.push_back(path);
  }
  out.cloud_fuse_s = scene.cloud_fusion_model.predict(
      static_cast<int>(groups.size()), 1.0);
  out.total_s = out.bottleneck_path_s + out.cloud_fuse_s;
  return out;
}

CloudBaseline cloud_baseline_latency(const Scene& scene, const CostParams& p,
                                     const MapSizeModel& sizes) {
  p.validate();
  if (scene.robots.empty())
    throw std::invalid_argument("cloud baseline: needs at least one robot");
  CloudBaseline out;
  for (std::size_t r = 0; r < scene.robots.size(); ++r) {
    const double upload = sizes.map_bytes.at(r) / p.cloud_uplink_bw_robot;
    out.max_local_s = std::max(out.max_local_s, p.local_slam_latency_s);
    out.max_upload_s = std::max(out.max_upload_s, upload);
    out.bottleneck_path_s =
        std::max(out.bottleneck_path_s, p.local_slam_latency_s + upload);
  }
  out.cloud_fuse_s = scene.cloud_fusion_model.predict(
      static_cast<int>(scene.robots.size()), 1.0);
  out.total_s = out.bottleneck_path_s + out.cloud_fuse_s;
  return out;
}

}  // namespace edgefuse
