#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgefuse/gridmap.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = EDGEFUSE_CLI_PATH;
const fs::path kRepo = EDGEFUSE_REPO_DIR;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  std::string tmpl = (fs::temp_directory_path() / "edgefuse_cli_XXXXXX").string();
  char* made = mkdtemp(tmpl.data());
  REQUIRE(made != nullptr);
  return fs::path(made);
}

CliResult run_cli(const std::string& args) {
  const fs::path dir = temp_dir();
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd =
      kCli + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  fs::remove_all(dir);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!row.empty() && row.back() == ',') out.push_back("");
  return out;
}

std::string apartment() { return (kRepo / "fixtures/apartment.json").string(); }

}  // namespace

TEST_CASE("schedule emits one row per run plus a single cloud row") {
  const fs::path dir = temp_dir();
  const fs::path csv = dir / "runs.csv";
  CliResult r = run_cli("schedule " + apartment() +
                        " --policy recslam,cloud --seeds 10 --no-timestamp -o " +
                        csv.string());
  REQUIRE(r.exit_code == 0);
  INFO(r.err);

  const auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 12); // header + cloud + 10 recslam seeds
  CHECK(lines[0] ==
        "policy,seed,robots,edges,groups,fitness,total_latency_s,"
        "bottleneck_path_s,cloud_fuse_s,max_robot_s,max_edge_fuse_s,"
        "max_upload_s,sched_wall_ms,profile_id");

  const auto cloud = fields_of(lines[1]);
  CHECK(cloud[0] == "cloud");
  CHECK(cloud[4] == "0");
  CHECK(cloud[5].empty());

  for (int i = 0; i < 10; ++i) {
    const auto row = fields_of(lines[2 + i]);
    REQUIRE(row.size() == 14);
    CHECK(row[0] == "recslam");
    CHECK(row[1] == std::to_string(i)); // sorted by (policy, seed)
    CHECK(row[2] == "10");
    CHECK(row[3] == "3");
    CHECK(row[4] == "3");
    CHECK(row[12].empty()); // wall time suppressed with --no-timestamp
  }
  fs::remove_all(dir);
}

TEST_CASE("explicit seed lists run exactly those seeds") {
  const fs::path dir = temp_dir();
  const fs::path csv = dir / "runs.csv";
  CliResult r = run_cli("schedule " + apartment() +
                        " --policy random --seeds 7,3 --no-timestamp -o " +
                        csv.string());
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 3);
  CHECK(fields_of(lines[1])[1] == "3"); // rows sorted by seed
  CHECK(fields_of(lines[2])[1] == "7");
  fs::remove_all(dir);
}

TEST_CASE("suppressing the timestamp makes repeat runs byte-identical") {
  const fs::path dir = temp_dir();
  const fs::path a = dir / "a.csv";
  const fs::path b = dir / "b.csv";
  const std::string args = "schedule " + apartment() +
                           " --policy recslam,greedy,random,cloud --seeds 5 "
                           "--no-timestamp -o ";
  REQUIRE(run_cli(args + a.string()).exit_code == 0);
  REQUIRE(run_cli(args + b.string()).exit_code == 0);
  const std::string bytes_a = slurp(a);
  CHECK(!bytes_a.empty());
  CHECK(bytes_a == slurp(b));

  // with the timestamp on, the header line dates the file
  const fs::path c = dir / "c.csv";
  REQUIRE(run_cli("schedule " + apartment() + " --policy cloud -o " +
                  c.string())
              .exit_code == 0);
  CHECK(slurp(c).rfind("# generated ", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("worker count does not change the output") {
  const fs::path dir = temp_dir();
  const fs::path a = dir / "serial.csv";
  const fs::path b = dir / "parallel.csv";
  const std::string args = "schedule " + apartment() +
                           " --policy recslam,greedy,random --seeds 8 "
                           "--no-timestamp ";
  REQUIRE(run_cli(args + "--jobs 1 -o " + a.string()).exit_code == 0);
  REQUIRE(run_cli(args + "--jobs 4 -o " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  fs::remove_all(dir);
}

TEST_CASE("oracle columns report the exhaustive optimum and the gap") {
  const fs::path dir = temp_dir();
  const fs::path csv = dir / "runs.csv";
  CliResult r = run_cli("schedule " + apartment() +
                        " --policy recslam,random --seeds 3 --oracle "
                        "--no-timestamp -o " +
                        csv.string());
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 7);
  CHECK(lines[0].find(",oracle_total_s,oracle_gap_s") != std::string::npos);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto row = fields_of(lines[i]);
    REQUIRE(row.size() == 16);
    const double total = std::stod(row[6]);
    const double oracle = std::stod(row[14]);
    const double gap = std::stod(row[15]);
    CHECK(oracle <= total + 1e-12);
    CHECK(gap == doctest::Approx(total - oracle).epsilon(1e-9));
    CHECK(gap >= -1e-12);
  }
  fs::remove_all(dir);
}

TEST_CASE("json mode emits a parsable report array") {
  const fs::path dir = temp_dir();
  const fs::path out = dir / "runs.json";
  CliResult r = run_cli("schedule " + apartment() +
                        " --policy recslam,cloud --seeds 2 --json -o " +
                        out.string());
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 3);
  CHECK(j[0]["policy"] == "cloud");
  CHECK(j[1]["policy"] == "recslam");
  CHECK(j[1]["total_latency_s"].is_number());
  CHECK(j[1]["groups"].is_array());
  fs::remove_all(dir);
}

TEST_CASE("a malformed scenario exits 2 and writes nothing") {
  const fs::path dir = temp_dir();
  const fs::path bad = dir / "broken.json";
  std::ofstream(bad) << "{ \"robots\": [ nonsense";
  const fs::path out = dir / "runs.csv";
  CliResult r = run_cli("schedule " + bad.string() + " -o " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(!fs::exists(out)); // no partial output on failure
  fs::remove_all(dir);
}

TEST_CASE("user errors exit 2 with a pointed message") {
  CliResult missing = run_cli("schedule /nonexistent/scene.json");
  CHECK(missing.exit_code == 2);

  CliResult policy = run_cli("schedule " + apartment() + " --policy turbo");
  CHECK(policy.exit_code == 2);
  CHECK(policy.err.find("turbo") != std::string::npos);

  CliResult seeds = run_cli("schedule " + apartment() + " --seeds 0");
  CHECK(seeds.exit_code == 2);

  CliResult tabu = run_cli("schedule " + apartment() + " --tabu-iters -4");
  CHECK(tabu.exit_code == 2);

  CliResult counts = run_cli("profile --counts 2,3");
  CHECK(counts.exit_code == 2);

  CliResult reps = run_cli("profile --counts 2,3,4 --reps 0");
  CHECK(reps.exit_code == 2);

  CliResult no_sub = run_cli("");
  CHECK(no_sub.exit_code == 2);
}

TEST_CASE("help exits 0 and lists the subcommands") {
  CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("schedule") != std::string::npos);
  CHECK(r.out.find("sweep") != std::string::npos);
  CHECK(r.out.find("mapmerge") != std::string::npos);
  CHECK(r.out.find("profile") != std::string::npos);
}

TEST_CASE("sweep emits rows grouped by scene size") {
  const fs::path dir = temp_dir();
  const fs::path csv = dir / "sweep.csv";
  CliResult r = run_cli("sweep " + (kRepo / "fixtures/sweep_template.json").string() +
                        " --robots 6,9 --policy recslam,cloud --seeds 2 "
                        "--density 0.4 --no-timestamp -o " +
                        csv.string());
  REQUIRE(r.exit_code == 0);
  INFO(r.err);
  const auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 7); // header + (cloud + 2 recslam) per robot count

  auto row = [&](int i) { return fields_of(lines[i]); };
  for (int i : {1, 2, 3}) CHECK(row(i)[2] == "6");
  for (int i : {4, 5, 6}) CHECK(row(i)[2] == "9");
  CHECK(row(1)[0] == "cloud");
  CHECK(row(2)[0] == "recslam");
  CHECK(row(2)[1] == "0");
  CHECK(row(3)[1] == "1");
  CHECK(row(4)[0] == "cloud");
  fs::remove_all(dir);
}

TEST_CASE("mapmerge fuses grids and a self-merge is byte-stable") {
  const fs::path dir = temp_dir();
  const auto maps = edgefuse::make_profiling_fixture(3);
  std::vector<std::string> inputs;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const fs::path p = dir / ("map" + std::to_string(i) + ".pgm");
    edgefuse::write_pgm(maps[i], p);
    inputs.push_back(p.string());
  }

  const fs::path merged = dir / "merged.pgm";
  CliResult r = run_cli("mapmerge " + inputs[0] + " " + inputs[1] + " " +
                        inputs[2] + " -o " + merged.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("pairwise_checks=3") != std::string::npos);
  CHECK(r.out.find("components=1") != std::string::npos);
  REQUIRE(fs::exists(merged));

  // merging a single map must reproduce it exactly
  const fs::path again = dir / "again.pgm";
  REQUIRE(run_cli("mapmerge " + merged.string() + " -o " + again.string())
              .exit_code == 0);
  CHECK(slurp(again) == slurp(merged));

  // corrupt input is a user error
  const fs::path broken = dir / "broken.pgm";
  std::ofstream(broken) << "P5 not really";
  CHECK(run_cli("mapmerge " + broken.string() + " -o " + (dir / "x.pgm").string())
            .exit_code == 2);
  fs::remove_all(dir);
}

TEST_CASE("profile fits the measured fusion curve and saves coefficients") {
  const fs::path dir = temp_dir();
  const fs::path out = dir / "coeffs.json";
  CliResult r = run_cli("profile --counts 2,3,4 --reps 1 -o " + out.string());
  REQUIRE(r.exit_code == 0);
  INFO(r.err);
  const nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["alpha"].is_number());
  CHECK(j["beta"].is_number());
  CHECK(j["gamma"].is_number());
  CHECK(j["r_squared"].get<double>() <= 1.0 + 1e-12);
  REQUIRE(j["samples"].is_array());
  CHECK(j["samples"].size() == 3);
  CHECK(j["samples"][0]["k"] == 2);
  CHECK(j["samples"][0]["seconds"].get<double>() >= 0.0);
  fs::remove_all(dir);
}
