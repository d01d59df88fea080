// qquiz: reproduce the single-query spin-chain similarity study.
//
//   qquiz table   --out results/        # fig2.csv, the chi_opt(F) lookup table
//   qquiz sweep   --out results/        # fig3.csv, similarity gain per target
//   qquiz noise   --eps 0 0.05 0.1      # noise.csv, noisy-lookup error
//   qquiz measure --trials 10000        # measure.csv, projective-measurement oracle
//
// Exit status: 0 success, 1 invalid input, 2 I/O failure, 3 a --check gate failed.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qquiz/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitCheck = 3;

template <class T>
void add_optional(CLI::App& app, const std::string& name, std::optional<T>& target,
                  const std::string& help) {
  app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-query global-rotation protocol for periodic spin chains"};
  app.require_subcommand(1);

  qquiz::ConfigOverrides flags;
  std::optional<std::string> config_path;
  bool check = false;

  auto add_shared = [&](CLI::App* sub) {
    add_optional(*sub, "--n", flags.n, "Chain length N (default 4)");
    add_optional(*sub, "--j", flags.j, "ZZ coupling J (default 1)");
    add_optional(*sub, "--bmin", flags.bmin, "Smallest field value (default -0.5)");
    add_optional(*sub, "--bmax", flags.bmax, "Largest field value (default 0.5)");
    add_optional(*sub, "--d", flags.d, "Number of field levels D (default 5)");
    add_optional(*sub, "--seed", flags.seed, "Base RNG seed (default 42)");
    sub->add_option_function<std::vector<double>>(
           "--eps", [&](const std::vector<double>& v) { flags.eps = v; },
           "Noise bounds for `noise` (default 0 0.05 0.1)")
        ->expected(1, -1);
    add_optional(*sub, "--trials", flags.trials, "Trials per target (noise 200, measure 10000)");
    add_optional(*sub, "--out", flags.out, "Output directory (default .)");
    add_optional(*sub, "--threads", flags.threads, "Worker threads, 0 = OpenMP default");
    add_optional(*sub, "--oracle", flags.oracle, "exact | uniform-noise | measurement");
    sub->add_option_function<std::string>(
        "--config", [&](const std::string& p) { config_path = p; }, "JSON file of flag values");
    sub->add_flag("--check", check, "Exit with status 3 if any reference gate fails");
  };

  auto* table = app.add_subcommand("table", "Build the chi_opt(F) lookup table (fig2.csv)");
  auto* sweep = app.add_subcommand("sweep", "Run the protocol on every target (fig3.csv)");
  auto* noise = app.add_subcommand("noise", "Noisy-lookup chi error study (noise.csv)");
  auto* measure = app.add_subcommand("measure", "Measurement-sampled oracle study (measure.csv)");
  for (auto* sub : {table, sweep, noise, measure}) add_shared(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (check) flags.check = true;

  try {
    const auto env = qquiz::ConfigOverrides::from_environment();
    const auto file = config_path ? qquiz::ConfigOverrides::from_file(*config_path)
                                  : qquiz::ConfigOverrides{};
    const qquiz::RunConfig config = qquiz::resolve_config(env, file, flags);
    config.validate();

    std::vector<qquiz::CheckResult> checks;
    if (table->parsed()) checks = qquiz::cmd_table(config, std::cout).checks;
    else if (sweep->parsed()) checks = qquiz::cmd_sweep(config, std::cout).checks;
    else if (noise->parsed()) checks = qquiz::cmd_noise(config, std::cout).checks;
    else checks = qquiz::cmd_measure(config, std::cout).checks;

    if (config.check && !qquiz::all_passed(checks)) return kExitCheck;
    return kExitOk;
  } catch (const qquiz::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const qquiz::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
