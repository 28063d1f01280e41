#include "edgefuse/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgefuse/detail/rng.hpp"
#include "edgefuse/errors.hpp"

#ifndef EDGEFUSE_DEFAULT_PROFILE_DIR
#define EDGEFUSE_DEFAULT_PROFILE_DIR ""
#endif

namespace edgefuse {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

double require_number(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  if (!j[key].is_number()) fail(where + "." + key, "must be a number");
  return j[key].get<double>();
}

double optional_number(const json& j, const std::string& where, const char* key,
                       double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(where + "." + key, "must be a number");
  return j[key].get<double>();
}

FusionLatencyModel parse_fusion(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "must be an object with alpha/beta/gamma");
  FusionLatencyModel m;
  m.alpha = require_number(j, where, "alpha");
  m.beta = require_number(j, where, "beta");
  m.gamma = require_number(j, where, "gamma");
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return m;
}

CostProfile parse_profile_body(const json& j, const std::string& where,
                               std::string name) {
  CostProfile p;
  p.name = std::move(name);
  p.params.t_pack_s = require_number(j, where, "t_pack_s");
  p.params.t_frame_s = require_number(j, where, "t_frame_s");
  p.params.robot_uplink_bw = require_number(j, where, "robot_uplink_bw");
  p.params.local_slam_latency_s = require_number(j, where, "local_slam_latency_s");
  p.params.cloud_uplink_bw_robot = require_number(j, where, "cloud_uplink_bw_robot");
  if (!j.contains("edge_fusion")) fail(where, "missing field 'edge_fusion'");
  p.edge_fusion = parse_fusion(j["edge_fusion"], where + ".edge_fusion");
  p.cloud_compute_scale =
      optional_number(j, where, "cloud_compute_scale", p.cloud_compute_scale);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return p;
}

RobotSpec parse_robot(const json& j, const std::string& where, int index,
                      bool allow_empty_route) {
  if (!j.is_object()) fail(where, "must be an object");
  RobotSpec r;
  r.id = static_cast<int>(optional_number(j, where, "id", index));
  if (j.contains("route")) {
    if (!j["route"].is_array()) fail(where + ".route", "must be an array of [x, y] points");
    for (std::size_t k = 0; k < j["route"].size(); ++k) {
      const json& pt = j["route"][k];
      const std::string pw = where + ".route[" + std::to_string(k) + "]";
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
        fail(pw, "must be [x, y]");
      r.route.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
  }
  r.scan_radius = optional_number(j, where, "scan_radius", 1.0);
  r.raw_frame_bytes = static_cast<std::uint64_t>(
      optional_number(j, where, "raw_frame_bytes", 23500.0));
  if (j.contains("map_bytes"))
    r.map_bytes = require_number(j, where, "map_bytes");
  if (!allow_empty_route) {
    try {
      r.validate();
    } catch (const InputError& e) {
      fail(where, e.what());
    }
  }
  return r;
}

EdgeServerSpec parse_edge(const json& j, const std::string& where, int index) {
  if (!j.is_object()) fail(where, "must be an object");
  EdgeServerSpec e;
  e.id = static_cast<int>(optional_number(j, where, "id", index));
  e.compute_scale = optional_number(j, where, "compute_scale", 1.0);
  e.uplink_bw_robot = require_number(j, where, "uplink_bw_robot");
  e.uplink_bw_cloud = require_number(j, where, "uplink_bw_cloud");
  try {
    e.validate();
  } catch (const InputError& ex) {
    fail(where, ex.what());
  }
  return e;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  const json j = parse_file(path);
  const std::string where = path.filename().string();
  if (!j.is_object()) fail(where, "scenario must be a JSON object");

  Scenario sc;
  sc.scene.raster_resolution =
      optional_number(j, where, "raster_resolution", 0.05);

  if (j.contains("robots")) {
    if (!j["robots"].is_array()) fail(where + ".robots", "must be an array");
    for (std::size_t i = 0; i < j["robots"].size(); ++i)
      sc.scene.robots.push_back(parse_robot(j["robots"][i],
                                            where + ".robots[" + std::to_string(i) + "]",
                                            static_cast<int>(i), false));
  }
  if (j.contains("robot_template"))
    sc.robot_template =
        parse_robot(j["robot_template"], where + ".robot_template", 0, true);

  if (!j.contains("edges") || !j["edges"].is_array() || j["edges"].empty())
    fail(where, "needs a nonempty 'edges' array");
  for (std::size_t i = 0; i < j["edges"].size(); ++i)
    sc.scene.edges.push_back(parse_edge(j["edges"][i],
                                        where + ".edges[" + std::to_string(i) + "]",
                                        static_cast<int>(i)));

  if (j.contains("overlap_matrix")) {
    const json& m = j["overlap_matrix"];
    const std::string mw = where + ".overlap_matrix";
    if (!m.is_array()) fail(mw, "must be an array of rows");
    const auto v = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd deg(v, v);
    for (Eigen::Index r = 0; r < v; ++r) {
      if (!m[r].is_array() || static_cast<Eigen::Index>(m[r].size()) != v)
        fail(mw + "[" + std::to_string(r) + "]",
             "must be a row of " + std::to_string(v) + " numbers");
      for (Eigen::Index c = 0; c < v; ++c) {
        if (!m[r][c].is_number())
          fail(mw + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
               "must be a number");
        deg(r, c) = m[r][c].get<double>();
      }
    }
    sc.scene.overlap_matrix = std::move(deg);
  }

  if (j.contains("cost_params"))
    sc.cost = parse_profile_body(j["cost_params"], where + ".cost_params",
                                 "scenario:" + where);

  if (j.contains("cloud_fusion")) {
    sc.scene.cloud_fusion_model =
        parse_fusion(j["cloud_fusion"], where + ".cloud_fusion");
    sc.cloud_fusion_pinned = true;
  } else if (sc.cost) {
    sc.scene.cloud_fusion_model = sc.cost->cloud_fusion();
    sc.cloud_fusion_pinned = true;
  }

  if (sc.scene.robots.empty() && !sc.robot_template)
    fail(where, "needs 'robots' or a 'robot_template'");
  if (!sc.scene.robots.empty()) {
    try {
      sc.scene.validate();
    } catch (const InputError& e) {
      fail(where, e.what());
    }
  }
  return sc;
}

namespace {

std::vector<std::filesystem::path> preset_search_paths() {
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("EDGEFUSE_PROFILE_DIR"); env && *env)
    dirs.emplace_back(env);
  dirs.emplace_back("profiles");
  if (const char* fallback = EDGEFUSE_DEFAULT_PROFILE_DIR; *fallback)
    dirs.emplace_back(fallback);
  std::vector<std::filesystem::path> files;
  for (const auto& d : dirs) files.push_back(d / "presets.json");
  return files;
}

}  // namespace

CostProfile load_profile(const std::string& name_or_path) {
  const bool looks_like_path =
      name_or_path.find('/') != std::string::npos ||
      name_or_path.find('\\') != std::string::npos ||
      name_or_path.ends_with(".json");
  if (looks_like_path) {
    const std::filesystem::path path(name_or_path);
    const json j = parse_file(path);
    return parse_profile_body(j, path.filename().string(),
                              path.stem().string());
  }

  for (const auto& file : preset_search_paths()) {
    std::error_code ec;
    if (!std::filesystem::exists(file, ec)) continue;
    const json j = parse_file(file);
    const std::string where = file.string();
    if (!j.contains("presets") || !j["presets"].is_object())
      fail(where, "needs a 'presets' object");
    const json& presets = j["presets"];
    if (!presets.contains(name_or_path)) {
      std::string names;
      for (const auto& [k, v] : presets.items()) {
        if (!names.empty()) names += ", ";
        names += k;
      }
      fail(where, "no preset named '" + name_or_path + "' (available: " + names + ")");
    }
    return parse_profile_body(presets[name_or_path],
                              where + ".presets." + name_or_path, name_or_path);
  }
  throw InputError("no presets.json found; set EDGEFUSE_PROFILE_DIR or run from "
                   "the repository root");
}

CostProfile resolve_profile(const Scenario& scenario,
                            const std::optional<std::string>& profile_flag) {
  if (profile_flag) return load_profile(*profile_flag);
  if (scenario.cost) return *scenario.cost;
  return load_profile("wifi");
}

void apply_profile(Scenario& scenario, const CostProfile& profile) {
  if (!scenario.cloud_fusion_pinned)
    scenario.scene.cloud_fusion_model = profile.cloud_fusion();
}

Eigen::MatrixXd random_overlap_matrix(int vertex_count, double density,
                                      double weight_lo, double weight_hi,
                                      std::uint64_t seed) {
  if (vertex_count < 1)
    throw std::invalid_argument("random matrix: vertex count must be >= 1");
  if (!(density >= 0.0 && density <= 1.0))
    throw std::invalid_argument("random matrix: density must lie in [0, 1]");
  if (!(weight_lo >= 0.0 && weight_lo < weight_hi && weight_hi <= 0.5))
    throw std::invalid_argument(
        "random matrix: weight range must satisfy 0 <= lo < hi <= 0.5");

  detail::SplitMix64 rng = detail::seeded_stream(seed);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(vertex_count, vertex_count);
  for (int i = 0; i < vertex_count; ++i)
    for (int j = i + 1; j < vertex_count; ++j) {
      if (rng.unit() >= density) continue;
      // (lo, hi]: 1 - unit() lies in (0, 1].
      const double w = weight_lo + (weight_hi - weight_lo) * (1.0 - rng.unit());
      m(i, j) = w;
      m(j, i) = w;
    }
  return m;
}

Scene generate_random_scene(const Scenario& template_scenario,
                            const RandomSceneSpec& spec) {
  if (spec.robot_count < 1)
    throw std::invalid_argument("random scene: robot count must be >= 1");

  RobotSpec base;
  if (template_scenario.robot_template) {
    base = *template_scenario.robot_template;
  } else if (!template_scenario.scene.robots.empty()) {
    base = template_scenario.scene.robots.front();
  } else {
    throw std::invalid_argument("random scene: template has no robot to clone");
  }

  Scene scene;
  scene.edges = template_scenario.scene.edges;
  scene.raster_resolution = template_scenario.scene.raster_resolution;
  scene.cloud_fusion_model = template_scenario.scene.cloud_fusion_model;
  scene.robots.reserve(spec.robot_count);
  for (int i = 0; i < spec.robot_count; ++i) {
    RobotSpec r = base;
    r.id = i;
    // Placeholder pose; pairwise structure comes from the sampled matrix.
    r.route = {Eigen::Vector2d(3.0 * i, 0.0)};
    scene.robots.push_back(std::move(r));
  }
  scene.overlap_matrix = random_overlap_matrix(
      spec.robot_count, spec.density, spec.weight_lo, spec.weight_hi, spec.seed);
  return scene;
}

}  // namespace edgefuse
