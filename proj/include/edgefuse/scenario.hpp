#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "edgefuse/costmodel.hpp"
#include "edgefuse/scene.hpp"

namespace edgefuse {

struct Scenario {
  Scene scene;
  // Cost constants embedded in the scenario file, if any.
  std::optional<CostProfile> cost;
  // Template robot for generated scenes; templates may omit "robots" entirely.
  std::optional<RobotSpec> robot_template;
  // True when the file pins cloud_fusion explicitly instead of deriving it
  // from the active profile.
  bool cloud_fusion_pinned = false;
};

// Fills the scene's cloud fusion model from the profile unless the scenario
// pinned one explicitly.
void apply_profile(Scenario& scenario, const CostProfile& profile);

// Parses and validates a scenario JSON file. Throws InputError with a
// field-path diagnostic on any violation.
Scenario load_scenario(const std::filesystem::path& path);

// Loads a preset by name from the first presets.json found in
// $EDGEFUSE_PROFILE_DIR, ./profiles, or the build-time default directory;
// a name containing a path separator or .json suffix is read as a file
// holding a single profile.
CostProfile load_profile(const std::string& name_or_path);

// Precedence: explicit flag, then the scenario's embedded constants, then the
// wifi preset.
CostProfile resolve_profile(const Scenario& scenario,
                            const std::optional<std::string>& profile_flag);

struct RandomSceneSpec {
  int robot_count = 0;
  double density = 0.3;     // probability a pair overlaps at all
  double weight_lo = 0.0;   // exclusive lower bound of sampled degrees
  double weight_hi = 0.5;   // inclusive upper bound
  std::uint64_t seed = 0;
};

// Scene with a sampled symmetric overlap matrix, taking servers and robot
// cost fields from the template scenario. Routes are placeholder points; all
// pairwise structure lives in the matrix.
Scene generate_random_scene(const Scenario& template_scenario,
                            const RandomSceneSpec& spec);

// Deterministic symmetric zero-diagonal matrix sampler shared by the random
// scene generator and the test harness.
Eigen::MatrixXd random_overlap_matrix(int vertex_count, double density,
                                      double weight_lo, double weight_hi,
                                      std::uint64_t seed);

}  // namespace edgefuse
