#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rplsim/report.hpp"

using namespace rplsim;

namespace {

long line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  long n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("grid composition") {
  ScenarioConfig base;
  MatrixOptions opt;
  opt.full_grid = true;
  auto cells = grid_cells(base, opt);
  REQUIRE(cells.size() == 9);  // baseline once, 2 variants x 4 intervals
  CHECK(cells[0].scenario == "baseline");
  CHECK(cells[1].scenario == "non_spoofed_1s");
  CHECK(cells[8].scenario == "spoofed_4s");

  opt.full_grid = false;
  opt.baseline_only = true;
  CHECK(grid_cells(base, opt).size() == 1);

  opt.baseline_only = false;
  base.attack_variant = AttackVariant::SPOOFED;
  base.replay_interval_s = 3;
  auto single = grid_cells(base, opt);
  REQUIRE(single.size() == 1);
  CHECK(single[0].scenario == "spoofed_3s");
}

TEST_CASE("numeric formatting is fixed at six significant digits") {
  CHECK(fmt6(0.00096) == "0.00096");
  CHECK(fmt6(1.0 / 3.0) == "0.333333");
  CHECK(fmt6(123456789.0) == "1.23457e+08");
  CHECK(fmt_opt(std::nullopt) == "nan");
}

TEST_CASE("emit writes stable csv row counts") {
  ScenarioConfig base;
  base.seed = 77;
  base.n_sensors = 5;
  base.n_attackers = 1;
  base.area_m = 80;
  base.sim_seconds = 120;
  base.replications = 2;
  base.attack_variant = AttackVariant::NONE;
  MatrixOptions opt;
  opt.baseline_only = true;
  opt.threads = 2;
  auto results = run_matrix(base, opt);
  REQUIRE(results.size() == 1);
  REQUIRE(results[0].runs.size() == 2);
  CHECK(results[0].runs[0].ok);
  CHECK(results[0].runs[1].ok);

  RunManifest man;
  man.config = base;
  man.out_dir = "out";
  man.seeds = {77, 78};
  const auto dir = std::filesystem::temp_directory_path() / "rplsim_report_test";
  std::filesystem::remove_all(dir);
  emit_outputs(results, man, dir.string(), true);

  CHECK(line_count(dir / "summary.csv") == 1 + 2);
  CHECK(line_count(dir / "summary_ci.csv") == 1 + 1);
  // 6 nodes x 2 bins x 2 runs
  CHECK(line_count(dir / "node_power.csv") == 1 + 6 * 2 * 2);
  CHECK(line_count(dir / "detector_flags.csv") >= 1);
  CHECK(line_count(dir / "manifest.txt") > 10);

  // manifest round-trips to the resolved configuration
  std::ifstream in(dir / "manifest.txt");
  std::ostringstream text;
  text << in.rdbuf();
  auto back = parse_config_text(text.str());
  CHECK(serialize_config(back) == serialize_config(base));

  CHECK_THROWS_AS(emit_outputs({}, man, dir.string(), true), IoError);
}

TEST_CASE("a failing cell reports its error without aborting the matrix") {
  ScenarioConfig base;
  base.seed = 3;
  base.n_sensors = 2;  // two sensors lost in 50 km x 50 km never connect
  base.n_attackers = 0;
  base.area_m = 50000;
  base.sim_seconds = 60;
  base.replications = 2;
  MatrixOptions opt;
  opt.baseline_only = true;
  auto results = run_matrix(base, opt);
  REQUIRE(results.size() == 1);
  for (const auto& r : results[0].runs) {
    CHECK_FALSE(r.ok);
    CHECK(r.topology_error);
    CHECK(!r.error.empty());
  }
}
