#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgefuse/detail/format.hpp"
#include "edgefuse/detail/io.hpp"
#include "edgefuse/errors.hpp"
#include "edgefuse/gridmap.hpp"
#include "edgefuse/pipeline.hpp"
#include "edgefuse/scenario.hpp"

namespace {

using namespace edgefuse;

struct RunFlags {
  std::string policies = "recslam";
  std::string seeds = "1";
  std::optional<std::string> profile;
  int tabu_iters = 100;
  std::size_t tabu_capacity = 10;
  bool no_tabu = false;
  bool with_oracle = false;
  int jobs = 1;
  bool as_json = false;
  bool no_timestamp = false;
  std::string output; // empty = stdout
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--policy", f.policies,
                  "Comma-separated policies: recslam, random, greedy, cloud");
  cmd->add_option("--seeds", f.seeds,
                  "Seed count N (runs seeds 0..N-1) or explicit comma list");
  cmd->add_option("--profile", f.profile,
                  "Cost profile preset name or JSON file path");
  cmd->add_option("--tabu-iters", f.tabu_iters, "Refinement iterations");
  cmd->add_option("--tabu-capacity", f.tabu_capacity, "Tabu list capacity");
  cmd->add_flag("--no-tabu", f.no_tabu, "Skip the refinement stage");
  cmd->add_flag("--oracle", f.with_oracle,
                "Add exhaustive-assignment optimum and gap columns");
  cmd->add_option("--jobs", f.jobs, "Worker threads for independent runs");
  cmd->add_flag("--json", f.as_json, "Emit per-run JSON reports instead of CSV");
  cmd->add_flag("--no-timestamp", f.no_timestamp,
                "Suppress the timestamp header and wall-time column for "
                "byte-reproducible output");
  cmd->add_option("-o,--output", f.output, "Output file (default: stdout)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  const auto items = split_list(s);
  if (items.empty()) throw InputError("--seeds: needs a count or a seed list");
  std::vector<std::uint64_t> seeds;
  try {
    if (items.size() == 1 && s.find(',') == std::string::npos) {
      const long long n = std::stoll(items[0]);
      if (n < 1) throw InputError("--seeds: count must be >= 1");
      for (long long i = 0; i < n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    } else {
      for (const auto& item : items)
        seeds.push_back(static_cast<std::uint64_t>(std::stoull(item)));
    }
  } catch (const std::logic_error&) {
    throw InputError("--seeds: '" + s + "' is not a count or comma list of integers");
  }
  return seeds;
}

std::vector<std::string> parse_policies(const std::string& s) {
  const auto items = split_list(s);
  if (items.empty()) throw InputError("--policy: needs at least one policy");
  const std::set<std::string> known{"recslam", "random", "greedy", "cloud"};
  std::vector<std::string> out;
  for (const auto& p : items) {
    if (!known.count(p))
      throw InputError("--policy: unknown policy '" + p +
                       "' (expected recslam, random, greedy or cloud)");
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

TabuConfig make_tabu(const RunFlags& flags) {
  TabuConfig tabu;
  tabu.max_iterations = flags.tabu_iters;
  tabu.tabu_capacity = flags.tabu_capacity;
  try {
    tabu.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("--tabu-iters/--tabu-capacity: ") + e.what());
  }
  return tabu;
}

std::string timestamp_line() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[40];
  std::strftime(buf, sizeof(buf), "# generated %Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty())
    std::cout << text;
  else
    detail::atomic_write_file(output, text);
}

struct RunCell {
  std::string policy;
  std::uint64_t seed = 0;
  const Scene* scene = nullptr;
  int robots = 0;
};

// Runs every cell, in parallel when asked, and returns results in cell order.
std::vector<ScheduleResult> run_cells(const std::vector<RunCell>& cells,
                                      const CostProfile& profile,
                                      const TabuConfig& tabu,
                                      const RunFlags& flags) {
  if (flags.with_oracle)
    for (const auto& c : cells)
      if (c.scene->edges.size() > 8)
        throw InputError("--oracle: exhaustive assignment is limited to 8 edge servers");

  std::vector<ScheduleResult> results(cells.size());
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= cells.size() || failed.load()) break;
      const RunCell& c = cells[i];
      try {
        ScheduleResult r;
        if (c.policy == "recslam") {
          PipelineOptions opts;
          opts.use_tabu = !flags.no_tabu;
          r = run_recslam(*c.scene, profile, tabu, c.seed, opts);
        } else if (c.policy == "random") {
          r = run_random_baseline(*c.scene, profile, c.seed);
        } else if (c.policy == "greedy") {
          r = run_greedy_baseline(*c.scene, profile, c.seed);
        } else {
          r = run_cloud_baseline(*c.scene, profile);
        }
        if (flags.with_oracle && r.grouping)
          r.oracle_total_s = oracle_total_for_grouping(*c.scene, profile, *r.grouping);
        results[i] = std::move(r);
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        if (!failed.exchange(true)) error = e.what();
        break;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(flags.jobs, cells.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(error);
  return results;
}

std::string render(const std::vector<ScheduleResult>& results,
                   const RunFlags& flags) {
  std::string out;
  if (flags.as_json) {
    out += "[\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      out += json_report(results[i]);
      if (i + 1 < results.size()) out += ",";
      out += "\n";
    }
    out += "]\n";
    return out;
  }
  if (!flags.no_timestamp) out += timestamp_line() + "\n";
  out += csv_header(flags.with_oracle) + "\n";
  for (const auto& r : results)
    out += to_csv_row(r, flags.with_oracle, flags.no_timestamp) + "\n";
  return out;
}

int cmd_schedule(const std::string& scenario_path, const RunFlags& flags) {
  Scenario scenario = load_scenario(scenario_path);
  const CostProfile profile = resolve_profile(scenario, flags.profile);
  apply_profile(scenario, profile);
  if (scenario.scene.robots.empty())
    throw InputError(scenario_path + ": scheduling needs a concrete 'robots' list");
  // One shared matrix per invocation: every policy prices the same geometry.
  scenario.scene.overlap_matrix = resolve_overlap_matrix(scenario.scene);

  const TabuConfig tabu = make_tabu(flags);
  const auto policies = parse_policies(flags.policies);
  const auto seeds = parse_seeds(flags.seeds);

  std::vector<RunCell> cells;
  for (const auto& policy : policies) {
    if (policy == "cloud") {
      cells.push_back({policy, 0, &scenario.scene,
                       static_cast<int>(scenario.scene.robots.size())});
      continue;
    }
    for (const auto seed : seeds)
      cells.push_back({policy, seed, &scenario.scene,
                       static_cast<int>(scenario.scene.robots.size())});
  }
  std::sort(cells.begin(), cells.end(), [](const RunCell& a, const RunCell& b) {
    return std::tie(a.policy, a.seed) < std::tie(b.policy, b.seed);
  });

  emit(render(run_cells(cells, profile, tabu, flags), flags), flags.output);
  return 0;
}

int cmd_sweep(const std::string& template_path, const std::string& robots_list,
              double density, const std::string& weight_range,
              const RunFlags& flags) {
  Scenario scenario = load_scenario(template_path);
  const CostProfile profile = resolve_profile(scenario, flags.profile);
  apply_profile(scenario, profile);

  std::vector<int> robot_counts;
  for (const auto& item : split_list(robots_list)) {
    try {
      robot_counts.push_back(std::stoi(item));
    } catch (const std::logic_error&) {
      throw InputError("--robots: '" + item + "' is not an integer");
    }
  }
  if (robot_counts.empty()) throw InputError("--robots: needs at least one count");

  double w_lo = 0.0, w_hi = 0.5;
  {
    const auto parts = split_list(weight_range);
    if (parts.size() != 2)
      throw InputError("--weight-range: expected 'lo,hi'");
    try {
      w_lo = std::stod(parts[0]);
      w_hi = std::stod(parts[1]);
    } catch (const std::logic_error&) {
      throw InputError("--weight-range: expected two numbers");
    }
  }

  const TabuConfig tabu = make_tabu(flags);
  const auto policies = parse_policies(flags.policies);
  const auto seeds = parse_seeds(flags.seeds);

  // One generated scene per (robot count, seed), shared by all policies.
  std::vector<std::unique_ptr<Scene>> scenes;
  std::vector<RunCell> cells;
  for (const int robots : robot_counts) {
    if (robots < 1) throw InputError("--robots: counts must be >= 1");
    for (const auto seed : seeds) {
      RandomSceneSpec spec;
      spec.robot_count = robots;
      spec.density = density;
      spec.weight_lo = w_lo;
      spec.weight_hi = w_hi;
      spec.seed = seed ^ (static_cast<std::uint64_t>(robots) << 32);
      try {
        scenes.push_back(
            std::make_unique<Scene>(generate_random_scene(scenario, spec)));
      } catch (const std::invalid_argument& e) {
        throw InputError(std::string("sweep: ") + e.what());
      }
      const Scene* scene = scenes.back().get();
      for (const auto& policy : policies) {
        if (policy == "cloud" && seed != seeds.front()) continue;
        cells.push_back({policy, policy == "cloud" ? 0 : seed, scene, robots});
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const RunCell& a, const RunCell& b) {
    return std::tie(a.robots, a.policy, a.seed) <
           std::tie(b.robots, b.policy, b.seed);
  });

  emit(render(run_cells(cells, profile, tabu, flags), flags), flags.output);
  return 0;
}

int cmd_mapmerge(const std::vector<std::string>& inputs,
                 const std::string& output) {
  std::vector<OccupancyGrid> maps;
  maps.reserve(inputs.size());
  for (const auto& path : inputs) maps.push_back(read_pgm(path));
  ComposeStats stats;
  const OccupancyGrid merged = compose(maps, &stats);
  write_pgm(merged, output);
  std::cout << "merged " << inputs.size() << " map(s) into " << output << "\n"
            << "pairwise_checks=" << stats.pairwise_checks
            << " overlapping_pairs=" << stats.overlapping_pairs
            << " components=" << stats.component_count
            << " known_bytes=" << known_size_bytes(merged) << "\n";
  return 0;
}

int cmd_profile(const std::string& counts_spec, int reps,
                const std::string& output) {
  std::vector<int> counts;
  if (counts_spec.find(':') != std::string::npos) {
    const auto pos = counts_spec.find(':');
    try {
      const int lo = std::stoi(counts_spec.substr(0, pos));
      const int hi = std::stoi(counts_spec.substr(pos + 1));
      if (lo < 1 || hi < lo) throw InputError("--counts: bad range");
      for (int k = lo; k <= hi; ++k) counts.push_back(k);
    } catch (const std::logic_error&) {
      throw InputError("--counts: expected 'lo:hi' or a comma list");
    }
  } else {
    for (const auto& item : split_list(counts_spec)) {
      try {
        counts.push_back(std::stoi(item));
      } catch (const std::logic_error&) {
        throw InputError("--counts: '" + item + "' is not an integer");
      }
    }
  }
  if (counts.empty()) throw InputError("--counts: needs at least one map count");
  const std::set<int> distinct(counts.begin(), counts.end());
  if (distinct.size() < 3)
    throw InputError("--counts: the quadratic fit needs at least three distinct map counts");
  if (*distinct.begin() < 1)
    throw InputError("--counts: map counts must be >= 1");
  if (reps < 1) throw InputError("--reps: must be >= 1");

  const FusionProfile prof = profile_fusion(counts, make_profiling_fixture, reps);

  nlohmann::json j;
  j["alpha"] = prof.model.alpha;
  j["beta"] = prof.model.beta;
  j["gamma"] = prof.model.gamma;
  j["r_squared"] = prof.r_squared;
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& [k, seconds] : prof.samples)
    samples.push_back({{"k", k}, {"seconds", seconds}});
  j["samples"] = std::move(samples);
  const std::string text = j.dump(2) + "\n";
  if (output.empty())
    std::cout << text;
  else
    detail::atomic_write_file(output, text);

  std::cerr << "alpha=" << detail::format_double(prof.model.alpha)
            << " beta=" << detail::format_double(prof.model.beta)
            << " gamma=" << detail::format_double(prof.model.gamma)
            << " r2=" << detail::format_double(prof.r_squared) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-assisted multi-robot map scheduling and fusion experiments"};
  app.require_subcommand(1);

  RunFlags sched_flags;
  std::string scenario_path;
  CLI::App* schedule = app.add_subcommand(
      "schedule", "Run scheduling policies on a scenario file");
  schedule->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  add_run_flags(schedule, sched_flags);

  RunFlags sweep_flags;
  std::string template_path;
  std::string robots_list;
  double density = 0.3;
  std::string weight_range = "0,0.5";
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run policies over generated scenes of growing size");
  sweep->add_option("template", template_path, "Template scenario JSON file")->required();
  sweep->add_option("--robots", robots_list, "Comma list of robot counts")->required();
  sweep->add_option("--density", density, "Probability that a robot pair overlaps");
  sweep->add_option("--weight-range", weight_range,
                    "Sampled overlap degrees, 'lo,hi' with 0 <= lo < hi <= 0.5");
  add_run_flags(sweep, sweep_flags);

  std::vector<std::string> merge_inputs;
  std::string merge_output;
  CLI::App* mapmerge =
      app.add_subcommand("mapmerge", "Fuse occupancy-grid PGM maps");
  mapmerge->add_option("inputs", merge_inputs, "Input PGM files")->required();
  mapmerge->add_option("-o,--output", merge_output, "Merged PGM output")->required();

  std::string counts_spec = "2:12";
  int reps = 3;
  std::string profile_output;
  CLI::App* profile = app.add_subcommand(
      "profile", "Measure fusion latency and fit the quadratic model");
  profile->add_option("--counts", counts_spec, "Map counts, 'lo:hi' or comma list");
  profile->add_option("--reps", reps, "Repetitions per count");
  profile->add_option("-o,--output", profile_output, "Coefficient JSON output");

  try {
    app.parse(argc, argv);
    if (schedule->parsed()) return cmd_schedule(scenario_path, sched_flags);
    if (sweep->parsed())
      return cmd_sweep(template_path, robots_list, density, weight_range, sweep_flags);
    if (mapmerge->parsed()) return cmd_mapmerge(merge_inputs, merge_output);
    if (profile->parsed()) return cmd_profile(counts_spec, reps, profile_output);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const edgefuse::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
