#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qquiz/experiments.hpp"

using namespace qquiz;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qquiz_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

RunConfig small_config(const std::string& name) {
  RunConfig c;
  c.n_sites = 3;
  c.grid = {-0.5, 0.5, 3};
  c.out_dir = scratch_dir(name);
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config precedence: flags over file over environment over defaults") {
  const RunConfig defaults = resolve_config({}, {}, {});
  CHECK(defaults.n_sites == 4);
  CHECK(defaults.coupling == 1.0);
  CHECK(defaults.grid == ParameterGrid{-0.5, 0.5, 5});
  CHECK(defaults.seed == 42);
  CHECK(defaults.epsilons == std::vector<double>{0.0, 0.05, 0.1});
  CHECK(defaults.noise_trials() == 200);
  CHECK(defaults.measure_trials() == 10000);
  CHECK(defaults.is_reference_setup());

  const nlohmann::json file_json = {{"n", 3},      {"j", 0.5},       {"bmin", -1.0},   {"bmax", 1.0},
                                    {"d", 4},      {"oracle", "measurement"},          {"eps", {0.2}},
                                    {"seed", 7},   {"trials", 11},   {"out", "from_file"},
                                    {"threads", 3}, {"check", true}};
  const ConfigOverrides file = ConfigOverrides::from_json(file_json);
  ConfigOverrides env;
  env.threads = 5;

  const RunConfig from_file = resolve_config(env, file, {});
  CHECK(from_file.n_sites == 3);
  CHECK(from_file.coupling == 0.5);
  CHECK(from_file.grid == ParameterGrid{-1.0, 1.0, 4});
  CHECK(from_file.oracle == OracleKind::Measurement);
  CHECK(from_file.epsilons == std::vector<double>{0.2});
  CHECK(from_file.seed == 7);
  CHECK(from_file.trials == 11);
  CHECK(from_file.out_dir == "from_file");
  CHECK(from_file.threads == 3);
  CHECK(from_file.check);
  CHECK_FALSE(from_file.is_reference_setup());

  CHECK(resolve_config(env, {}, {}).threads == 5);

  ConfigOverrides flags;
  flags.n = 5;
  flags.j = 2.0;
  flags.bmin = -0.1;
  flags.bmax = 0.1;
  flags.d = 2;
  flags.oracle = "exact";
  flags.eps = std::vector<double>{0.0, 0.3};
  flags.seed = 9;
  flags.trials = 12;
  flags.out = "from_flags";
  flags.threads = 1;
  flags.check = false;
  const RunConfig winner = resolve_config(env, file, flags);
  CHECK(winner.n_sites == 5);
  CHECK(winner.coupling == 2.0);
  CHECK(winner.grid == ParameterGrid{-0.1, 0.1, 2});
  CHECK(winner.oracle == OracleKind::Exact);
  CHECK(winner.epsilons == std::vector<double>{0.0, 0.3});
  CHECK(winner.seed == 9);
  CHECK(winner.trials == 12);
  CHECK(winner.out_dir == "from_flags");
  CHECK(winner.threads == 1);
  CHECK_FALSE(winner.check);

  CHECK_THROWS_AS(ConfigOverrides::from_json({{"bogus", 1}}), ValidationError);
  CHECK_THROWS_AS(ConfigOverrides::from_json({{"n", "four"}}), ValidationError);
  CHECK(ConfigOverrides::from_json({{"eps", 0.05}}).eps == std::vector<double>{0.05});
}

TEST_CASE("thread count from the environment") {
  ::setenv(kThreadsEnvVar, "6", 1);
  CHECK(ConfigOverrides::from_environment().threads == 6);
  ::setenv(kThreadsEnvVar, "lots", 1);
  CHECK_THROWS_AS(ConfigOverrides::from_environment(), ValidationError);
  ::unsetenv(kThreadsEnvVar);
  CHECK_FALSE(ConfigOverrides::from_environment().threads.has_value());
}

TEST_CASE("config validation") {
  RunConfig c;
  c.n_sites = 1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.epsilons = {};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.epsilons = {-0.1};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.grid = {0.5, -0.5, 5};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.n_sites = 11;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("table command") {
  std::ostringstream log;
  RunConfig c = small_config("table");
  const TableRun run = cmd_table(c, log);
  CHECK(run.table.size() == 27);
  CHECK(all_passed(run.checks));
  CHECK(std::filesystem::exists(c.out_dir / "fig2.csv"));
  CHECK(log.str().find("27 entries") != std::string::npos);
  CHECK(run.summary.chi_min <= run.summary.chi_median);
  CHECK(run.summary.chi_median <= run.summary.chi_max);

  // A one-level grid has a single target, the candidate itself.
  c.grid = {-0.5, 0.5, 1};
  const TableRun single = cmd_table(c, log);
  REQUIRE(single.table.size() == 1);
  CHECK(single.table.entries[0].chi_opt == 0.0);
  CHECK(single.table.entries[0].f == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sweep command") {
  std::ostringstream log;
  const RunConfig c = small_config("sweep");
  const SweepRun run = cmd_sweep(c, log);
  REQUIRE(run.rows.size() == 27);
  for (std::size_t i = 0; i < run.rows.size(); ++i) {
    CHECK(run.rows[i].target_id == i);
    CHECK(run.rows[i].delta_f >= -1e-9);
  }
  CHECK(all_passed(run.checks));
  const std::string csv = slurp(c.out_dir / "fig3.csv");
  CHECK(csv.rfind("target_id,F,delta_F\n", 0) == 0);
}

TEST_CASE("noise command on a small grid") {
  std::ostringstream log;
  RunConfig c = small_config("noise");
  c.trials = 50;
  const NoiseRun run = cmd_noise(c, log);
  REQUIRE(run.rows.size() == 3);
  CHECK(run.rows[0].mean_abs_chi_error < 1e-12);
  CHECK(all_passed(run.checks));
  CHECK(slurp(c.out_dir / "noise.csv").rfind("epsilon,mean_abs_chi_error,mean_delta_f\n", 0) == 0);
  const auto meta = nlohmann::json::parse(slurp(c.out_dir / "noise_meta.json"));
  CHECK(meta["noise_distribution"] == "uniform(-eps, eps)");
  CHECK(meta["trials"] == 50);
}

TEST_CASE("noisy lookup degrades the mean gain monotonically") {
  const RunConfig c;  // N = 4, J = 1, D = 5, seed 42, 200 trials
  const LookupTable table = build_table(c.grid, c.candidate(), c.coupling);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < c.epsilons.size(); ++e) {
    const NoiseRow row = noise_row(c, table, c.epsilons[e], e);
    CHECK(row.mean_delta_f <= previous);
    previous = row.mean_delta_f;
  }
}

TEST_CASE("measure command on a small grid") {
  std::ostringstream log;
  RunConfig c = small_config("measure");
  c.trials = 2000;
  const MeasureRun run = cmd_measure(c, log);
  REQUIRE(run.rows.size() == 27);
  CHECK(run.rows[0].f_est_std == 0.0);
  CHECK(run.rows[0].binomial_std == doctest::Approx(0.0).epsilon(1e-6));
  for (const auto& r : run.rows) CHECK(r.f_est_std <= std::sqrt(3.0));
  CHECK(slurp(c.out_dir / "measure.csv").rfind("target_id,F_exact,F_est_mean,F_est_std,binomial_std\n", 0) == 0);
}

TEST_CASE("experiments are independent of thread count") {
  RunConfig c = small_config("threads");
  c.trials = 300;
  const LookupTable table = build_table(c.grid, c.candidate(), c.coupling);
  c.threads = 1;
  const auto one_noise = noise_row(c, table, 0.1, 2);
  const auto one_measure = measure_rows(c);
  c.threads = 5;
  const auto many_noise = noise_row(c, table, 0.1, 2);
  const auto many_measure = measure_rows(c);
  CHECK(one_noise.mean_abs_chi_error == many_noise.mean_abs_chi_error);
  CHECK(one_noise.mean_delta_f == many_noise.mean_delta_f);
  for (std::size_t i = 0; i < one_measure.size(); ++i) {
    CHECK(one_measure[i].f_est_mean == many_measure[i].f_est_mean);
    CHECK(one_measure[i].f_est_std == many_measure[i].f_est_std);
  }
}

TEST_CASE("unwritable output directory is an I/O error") {
  RunConfig c = small_config("io");
  std::filesystem::create_directories(c.out_dir);
  std::ofstream(c.out_dir / "blocker") << "x";
  c.out_dir = c.out_dir / "blocker" / "sub";
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_table(c, log), IoError);
}
