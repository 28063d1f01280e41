#include "edgefuse/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "edgefuse/errors.hpp"

namespace edgefuse {

void RobotSpec::validate() const {
  if (route.empty())
    throw InputError("robot " + std::to_string(id) + ": route must not be empty");
  for (const auto& p : route)
    if (!p.allFinite())
      throw InputError("robot " + std::to_string(id) + ": route points must be finite");
  if (!(scan_radius > 0.0) || !std::isfinite(scan_radius))
    throw InputError("robot " + std::to_string(id) + ": scan_radius must be > 0");
  if (raw_frame_bytes == 0)
    throw InputError("robot " + std::to_string(id) + ": raw_frame_bytes must be > 0");
  if (map_bytes && (!(*map_bytes > 0.0) || !std::isfinite(*map_bytes)))
    throw InputError("robot " + std::to_string(id) + ": map_bytes must be > 0");
}

void EdgeServerSpec::validate() const {
  if (!(compute_scale > 0.0) || !std::isfinite(compute_scale))
    throw InputError("edge " + std::to_string(id) + ": compute_scale must be > 0");
  if (!(uplink_bw_robot > 0.0) || !std::isfinite(uplink_bw_robot))
    throw InputError("edge " + std::to_string(id) + ": uplink_bw_robot must be > 0");
  if (!(uplink_bw_cloud > 0.0) || !std::isfinite(uplink_bw_cloud))
    throw InputError("edge " + std::to_string(id) + ": uplink_bw_cloud must be > 0");
}

void Scene::validate() const {
  if (robots.empty()) throw InputError("scene: needs at least one robot");
  if (edges.empty()) throw InputError("scene: needs at least one edge server");
  if (!(raster_resolution > 0.0) || !std::isfinite(raster_resolution))
    throw InputError("scene: raster_resolution must be > 0");
  for (const auto& r : robots) r.validate();
  for (const auto& e : edges) e.validate();
  {
    std::unordered_set<int> ids;
    for (const auto& e : edges)
      if (!ids.insert(e.id).second)
        throw InputError("scene: duplicate edge server id " + std::to_string(e.id));
  }
  cloud_fusion_model.validate();
  if (overlap_matrix) {
    const Eigen::MatrixXd& m = *overlap_matrix;
    const auto v = static_cast<Eigen::Index>(robots.size());
    if (m.rows() != v || m.cols() != v)
      throw InputError("scene: overlap_matrix must be " + std::to_string(v) + "x" +
                       std::to_string(v));
    for (Eigen::Index i = 0; i < v; ++i) {
      if (m(i, i) != 0.0)
        throw InputError("scene: overlap_matrix diagonal must be zero");
      for (Eigen::Index j = 0; j < v; ++j) {
        double w = m(i, j);
        if (!std::isfinite(w) || w < 0.0 || w > 0.5)
          throw InputError("scene: overlap_matrix entries must lie in [0, 0.5]");
        if (m(i, j) != m(j, i))
          throw InputError("scene: overlap_matrix must be symmetric");
      }
    }
  }
}

CellSet::CellSet(std::vector<Cell> cells) : cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

std::size_t intersection_size(const CellSet& a, const CellSet& b) {
  const auto& xs = a.cells();
  const auto& ys = b.cells();
  std::size_t n = 0, i = 0, j = 0;
  while (i < xs.size() && j < ys.size()) {
    if (xs[i] < ys[j]) {
      ++i;
    } else if (ys[j] < xs[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

namespace {

std::uint64_t cell_key(std::int32_t x, std::int32_t y) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
         static_cast<std::uint32_t>(y);
}

void stamp_disc(const Eigen::Vector2d& c, double radius, double res,
                std::unordered_set<std::uint64_t>& out) {
  const double r2 = radius * radius;
  const auto x_lo = static_cast<std::int32_t>(std::floor((c.x() - radius) / res)) - 1;
  const auto x_hi = static_cast<std::int32_t>(std::floor((c.x() + radius) / res)) + 1;
  const auto y_lo = static_cast<std::int32_t>(std::floor((c.y() - radius) / res)) - 1;
  const auto y_hi = static_cast<std::int32_t>(std::floor((c.y() + radius) / res)) + 1;
  for (std::int32_t ix = x_lo; ix <= x_hi; ++ix) {
    const double dx = (ix + 0.5) * res - c.x();
    for (std::int32_t iy = y_lo; iy <= y_hi; ++iy) {
      const double dy = (iy + 0.5) * res - c.y();
      if (dx * dx + dy * dy <= r2) out.insert(cell_key(ix, iy));
    }
  }
}

}  // namespace

CellSet coverage_region(const RobotSpec& robot, double resolution) {
  robot.validate();
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw std::invalid_argument("coverage_region: resolution must be > 0");

  const double step = robot.scan_radius / 2.0;
  std::unordered_set<std::uint64_t> keys;
  keys.reserve(1024);
  stamp_disc(robot.route.front(), robot.scan_radius, resolution, keys);
  for (std::size_t s = 0; s + 1 < robot.route.size(); ++s) {
    const Eigen::Vector2d& a = robot.route[s];
    const Eigen::Vector2d& b = robot.route[s + 1];
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      stamp_disc(a + t * (b - a), robot.scan_radius, resolution, keys);
    }
  }

  std::vector<CellSet::Cell> cells;
  cells.reserve(keys.size());
  for (std::uint64_t k : keys)
    cells.emplace_back(static_cast<std::int32_t>(k >> 32),
                       static_cast<std::int32_t>(k & 0xffffffffu));
  return CellSet(std::move(cells));
}

double overlap_degree(const CellSet& a, const CellSet& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("overlap_degree: cell sets must be nonempty");
  const auto shared = static_cast<double>(intersection_size(a, b));
  return shared / static_cast<double>(a.size() + b.size());
}

Eigen::MatrixXd build_overlap_matrix(const Scene& scene) {
  scene.validate();
  if (scene.overlap_matrix) return *scene.overlap_matrix;

  const auto v = static_cast<Eigen::Index>(scene.robots.size());
  std::vector<CellSet> regions;
  regions.reserve(scene.robots.size());
  for (const auto& r : scene.robots)
    regions.push_back(coverage_region(r, scene.raster_resolution));

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(v, v);
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index j = i + 1; j < v; ++j) {
      const double w = overlap_degree(regions[i], regions[j]);
      m(i, j) = w;
      m(j, i) = w;
    }
  return m;
}

}  // namespace edgefuse
