#include "edgefuse/gridmap.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "edgefuse/costmodel.hpp"
#include "edgefuse/detail/format.hpp"
#include "edgefuse/detail/io.hpp"
#include "edgefuse/errors.hpp"

namespace edgefuse {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution,
                             const Eigen::Vector2d& origin, CellState fill)
    : width_(width),
      height_(height),
      resolution_(resolution),
      origin_(origin),
      cells_(static_cast<std::size_t>(width) * height, fill) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("occupancy grid: dimensions must be >= 1");
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw std::invalid_argument("occupancy grid: resolution must be > 0");
}

std::size_t OccupancyGrid::index(int x, int y) const {
  if (x < 0 || x >= width_ || y < 0 || y >= height_)
    throw std::out_of_range("occupancy grid: cell (" + std::to_string(x) + ", " +
                            std::to_string(y) + ") out of range");
  return static_cast<std::size_t>(y) * width_ + x;
}

CellState OccupancyGrid::at(int x, int y) const { return cells_[index(x, y)]; }

void OccupancyGrid::set(int x, int y, CellState s) { cells_[index(x, y)] = s; }

bool OccupancyGrid::content_equals(const OccupancyGrid& other) const {
  return width_ == other.width_ && height_ == other.height_ &&
         resolution_ == other.resolution_ && cells_ == other.cells_;
}

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  std::size_t components() {
    std::size_t n = 0;
    for (std::size_t i = 0; i < parent.size(); ++i)
      if (find(static_cast<int>(i)) == static_cast<int>(i)) ++n;
    return n;
  }
};

// Integer cell offset of map m inside a frame anchored at origin, snapping
// fractional offsets to the nearest whole cell.
std::pair<int, int> cell_offset(const OccupancyGrid& m, const Eigen::Vector2d& origin) {
  const double res = m.resolution();
  return {static_cast<int>(std::llround((m.origin().x() - origin.x()) / res)),
          static_cast<int>(std::llround((m.origin().y() - origin.y()) / res))};
}

}  // namespace

std::size_t known_intersection_cells(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (a.resolution() != b.resolution())
    throw InputError("map intersection: resolutions differ");
  const auto [bx, by] = cell_offset(b, a.origin());
  const int x_lo = std::max(0, bx);
  const int y_lo = std::max(0, by);
  const int x_hi = std::min(a.width(), bx + b.width());
  const int y_hi = std::min(a.height(), by + b.height());
  std::size_t n = 0;
  for (int y = y_lo; y < y_hi; ++y)
    for (int x = x_lo; x < x_hi; ++x)
      if (a.at(x, y) != CellState::Unknown &&
          b.at(x - bx, y - by) != CellState::Unknown)
        ++n;
  return n;
}

std::size_t known_size_bytes(const OccupancyGrid& m) {
  return static_cast<std::size_t>(
      std::count_if(m.cells().begin(), m.cells().end(),
                    [](CellState s) { return s != CellState::Unknown; }));
}

double measured_overlap_degree(const OccupancyGrid& a, const OccupancyGrid& b) {
  const std::size_t ka = known_size_bytes(a);
  const std::size_t kb = known_size_bytes(b);
  if (ka == 0 || kb == 0)
    throw std::invalid_argument("overlap degree: maps must have known cells");
  return static_cast<double>(known_intersection_cells(a, b)) /
         static_cast<double>(ka + kb);
}

OccupancyGrid compose(std::span<const OccupancyGrid> maps, ComposeStats* stats) {
  if (maps.empty()) throw InputError("compose: needs at least one map");
  const double res = maps[0].resolution();
  for (const auto& m : maps)
    if (m.resolution() != res)
      throw InputError("compose: maps must share one resolution");

  ComposeStats local;
  local.pairwise_checks = maps.size() * (maps.size() - 1) / 2;
  UnionFind uf(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i)
    for (std::size_t j = i + 1; j < maps.size(); ++j)
      if (known_intersection_cells(maps[i], maps[j]) > 0) {
        ++local.overlapping_pairs;
        uf.unite(static_cast<int>(i), static_cast<int>(j));
      }
  local.component_count = uf.components();

  Eigen::Vector2d origin = maps[0].origin();
  for (const auto& m : maps)
    origin = origin.cwiseMin(m.origin());
  // Snap every map to the merged lattice before sizing the canvas.
  int w = 0, h = 0;
  for (const auto& m : maps) {
    const auto [ox, oy] = cell_offset(m, origin);
    w = std::max(w, ox + m.width());
    h = std::max(h, oy + m.height());
  }

  OccupancyGrid out(w, h, res, origin, CellState::Unknown);
  for (const auto& m : maps) {
    const auto [ox, oy] = cell_offset(m, origin);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) {
        const CellState s = m.at(x, y);
        if (s == CellState::Unknown) continue;
        // Occupied beats Free beats Unknown.
        if (s == CellState::Occupied ||
            out.at(x + ox, y + oy) == CellState::Unknown)
          out.set(x + ox, y + oy, s);
      }
  }
  if (stats) *stats = local;
  return out;
}

namespace {

constexpr unsigned char kPgmOccupied = 0;
constexpr unsigned char kPgmFree = 254;
constexpr unsigned char kPgmUnknown = 205;

std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path) {
  std::filesystem::path p = pgm_path;
  p.replace_extension(".yaml");
  return p;
}

}  // namespace

void write_pgm(const OccupancyGrid& m, const std::filesystem::path& pgm_path) {
  std::string body;
  body.reserve(64 + static_cast<std::size_t>(m.width()) * m.height());
  body += "P5\n";
  body += std::to_string(m.width()) + " " + std::to_string(m.height()) + "\n255\n";
  // Image row 0 is the top of the map (largest y).
  for (int y = m.height() - 1; y >= 0; --y)
    for (int x = 0; x < m.width(); ++x) {
      unsigned char px = kPgmUnknown;
      switch (m.at(x, y)) {
        case CellState::Occupied: px = kPgmOccupied; break;
        case CellState::Free: px = kPgmFree; break;
        case CellState::Unknown: px = kPgmUnknown; break;
      }
      body.push_back(static_cast<char>(px));
    }
  detail::atomic_write_file(pgm_path, body);

  std::string meta;
  meta += "image: " + pgm_path.filename().string() + "\n";
  meta += "resolution: " + detail::format_double(m.resolution()) + "\n";
  meta += "origin: [" + detail::format_double(m.origin().x()) + ", " +
          detail::format_double(m.origin().y()) + ", 0]\n";
  meta += "negate: 0\n";
  meta += "occupied_thresh: 0.65\n";
  meta += "free_thresh: 0.196\n";
  detail::atomic_write_file(sidecar_path(pgm_path), meta);
}

namespace {

int read_pgm_token(std::istream& in, const std::filesystem::path& path) {
  // Skips whitespace and # comments between header fields.
  while (true) {
    int c = in.peek();
    if (c == EOF) throw InputError(path.string() + ": truncated header");
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value)) throw InputError(path.string() + ": malformed header number");
  return value;
}

}  // namespace

OccupancyGrid read_pgm(const std::filesystem::path& pgm_path) {
  std::ifstream in(pgm_path, std::ios::binary);
  if (!in) throw InputError("cannot open " + pgm_path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (!in || magic != "P5")
    throw InputError(pgm_path.string() + ": not a binary P5 image");
  const int width = read_pgm_token(in, pgm_path);
  const int height = read_pgm_token(in, pgm_path);
  const int maxval = read_pgm_token(in, pgm_path);
  if (width < 1 || height < 1)
    throw InputError(pgm_path.string() + ": bad image dimensions");
  if (maxval != 255)
    throw InputError(pgm_path.string() + ": maxval must be 255");
  in.get(); // single whitespace byte after the header

  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw InputError(pgm_path.string() + ": truncated pixel data");

  double resolution = 0.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  const std::filesystem::path meta = sidecar_path(pgm_path);
  std::ifstream min(meta);
  if (!min)
    throw InputError(meta.string() + ": metadata sidecar is required alongside the image");
  std::string line;
  bool have_res = false;
  while (std::getline(min, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!std::getline(ls, key, ':')) continue;
    if (key == "resolution") {
      if (!(ls >> resolution)) throw InputError(meta.string() + ": bad resolution");
      have_res = true;
    } else if (key == "origin") {
      std::string rest;
      std::getline(ls, rest);
      double x = 0.0, y = 0.0;
      if (std::sscanf(rest.c_str(), " [ %lf , %lf", &x, &y) != 2)
        throw InputError(meta.string() + ": bad origin");
      origin = Eigen::Vector2d(x, y);
    }
  }
  if (!have_res || !(resolution > 0.0))
    throw InputError(meta.string() + ": resolution must be given and > 0");

  OccupancyGrid grid(width, height, resolution, origin);
  for (int row = 0; row < height; ++row)
    for (int x = 0; x < width; ++x) {
      const unsigned char px = raw[static_cast<std::size_t>(row) * width + x];
      const int y = height - 1 - row;
      switch (px) {
        case kPgmOccupied: grid.set(x, y, CellState::Occupied); break;
        case kPgmFree:
        case 255: grid.set(x, y, CellState::Free); break;
        case kPgmUnknown: grid.set(x, y, CellState::Unknown); break;
        default:
          throw InputError(pgm_path.string() + ": unexpected pixel value " +
                           std::to_string(static_cast<int>(px)));
      }
    }
  return grid;
}

std::vector<OccupancyGrid> make_profiling_fixture(int k) {
  if (k < 1) throw std::invalid_argument("profiling fixture: k must be >= 1");
  // Same large room seen from k slightly shifted poses: every map pair
  // overlaps almost fully, so pairwise alignment work grows with k^2.
  constexpr int kSize = 420;
  constexpr double kRes = 0.05;
  std::vector<OccupancyGrid> maps;
  maps.reserve(k);
  for (int i = 0; i < k; ++i) {
    OccupancyGrid m(kSize, kSize, kRes,
                    Eigen::Vector2d(0.15 * i, 0.10 * i), CellState::Free);
    for (int x = 0; x < kSize; ++x) {
      m.set(x, 0, CellState::Occupied);
      m.set(x, kSize - 1, CellState::Occupied);
    }
    for (int y = 0; y < kSize; ++y) {
      m.set(0, y, CellState::Occupied);
      m.set(kSize - 1, y, CellState::Occupied);
    }
    // A few index-dependent interior obstacles so the maps are not identical.
    for (int b = 0; b < 6; ++b) {
      const int cx = 40 + ((i * 67 + b * 59) % (kSize - 80));
      const int cy = 40 + ((i * 31 + b * 83) % (kSize - 80));
      for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -3; dx <= 3; ++dx)
          m.set(cx + dx, cy + dy, CellState::Occupied);
    }
    maps.push_back(std::move(m));
  }
  return maps;
}

FusionProfile profile_fusion(std::span<const int> map_counts,
                             const FixtureGeneratorFn& fixture,
                             int repetitions) {
  if (repetitions < 1)
    throw std::invalid_argument("fusion profiling: repetitions must be >= 1");
  FusionProfile out;
  std::vector<std::pair<int, double>> fit_points;
  for (int k : map_counts) {
    if (k < 1) throw std::invalid_argument("fusion profiling: map counts must be >= 1");
    const std::vector<OccupancyGrid> maps = fixture(k);
    if (static_cast<int>(maps.size()) != k)
      throw std::invalid_argument("fusion profiling: fixture returned wrong map count");
    // Untimed warmup: the first merge pays allocator and cache costs that are
    // not part of the latency being modeled.
    (void)compose(maps, nullptr);
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < repetitions; ++rep) {
      ComposeStats stats;
      const auto start = std::chrono::steady_clock::now();
      const OccupancyGrid merged = compose(maps, &stats);
      const auto stop = std::chrono::steady_clock::now();
      if (merged.width() < 1) throw std::logic_error("fusion profiling: empty merge");
      const double seconds = std::chrono::duration<double>(stop - start).count();
      out.samples.emplace_back(k, seconds);
      best = std::min(best, seconds);
    }
    // The minimum is the least-disturbed observation of the deterministic work.
    fit_points.emplace_back(k, best);
  }
  const QuadraticFit fit = fit_fusion_model(fit_points);
  out.model = fit.model;
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace edgefuse
