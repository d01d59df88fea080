#include "qquiz/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qquiz/similarity.hpp"

namespace qquiz {
namespace {

// Random stream tags; one per experiment so their draws never coincide.
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
constexpr std::uint64_t kMeasureStream = 0x6d65617375ULL;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Runs body(i) for i in [0, count) in parallel and rethrows the first failure by index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> failures(count);
  const auto n = static_cast<std::int64_t>(count);
#ifdef _OPENMP
  const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(n_threads)
#else
  (void)threads;
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["n"] = c.n_sites;
  j["j"] = c.coupling;
  j["bmin"] = c.grid.b_min;
  j["bmax"] = c.grid.b_max;
  j["d"] = c.grid.levels;
  j["oracle"] = to_string(c.oracle);
  j["eps"] = c.epsilons;
  j["seed"] = c.seed;
  return j;
}

void write_meta(const RunConfig& config, const std::string& command, nlohmann::json extra) {
  nlohmann::json meta = config_json(config);
  meta["command"] = command;
  for (auto& [k, v] : extra.items()) meta[k] = v;
  write_file(config.out_dir / (command + "_meta.json"),
             [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CheckResult gate(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

void print_checks(std::ostream& log, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    log << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
  }
}

LookupTable table_for(const RunConfig& config) {
  return build_table(config.grid, config.candidate(), config.coupling, config.threads);
}

template <class T>
T get_checked(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

// ------------------------------------------------------------------ config

void RunConfig::validate() const {
  if (n_sites < 2) throw ValidationError("--n must be at least 2");
  if (n_sites > kDefaultMaxSites) {
    throw ValidationError("--n exceeds the dense limit of " + std::to_string(kDefaultMaxSites));
  }
  if (!std::isfinite(coupling)) throw ValidationError("--j must be finite");
  grid.validate();
  target_count(grid, n_sites);
  if (epsilons.empty()) throw ValidationError("--eps needs at least one value");
  for (double e : epsilons)
    if (!(e >= 0.0) || !std::isfinite(e)) throw ValidationError("--eps values must be >= 0");
  if (trials && *trials < 1) throw ValidationError("--trials must be at least 1");
  if (threads < 0) throw ValidationError("--threads cannot be negative");
}

ChainSpec RunConfig::candidate() const {
  return ChainSpec::uniform(n_sites, coupling, grid.b_min);
}

bool RunConfig::is_reference_setup() const {
  return n_sites == 4 && coupling == 1.0 && grid.b_min == -0.5 && grid.b_max == 0.5 &&
         grid.levels == 5;
}

ConfigOverrides ConfigOverrides::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  ConfigOverrides o;
  for (const auto& [key, v] : j.items()) {
    if (key == "n") o.n = get_checked<int>(v, key);
    else if (key == "j") o.j = get_checked<double>(v, key);
    else if (key == "bmin") o.bmin = get_checked<double>(v, key);
    else if (key == "bmax") o.bmax = get_checked<double>(v, key);
    else if (key == "d") o.d = get_checked<int>(v, key);
    else if (key == "oracle") o.oracle = get_checked<std::string>(v, key);
    else if (key == "eps") {
      o.eps = v.is_array() ? get_checked<std::vector<double>>(v, key)
                           : std::vector<double>{get_checked<double>(v, key)};
    } else if (key == "seed") o.seed = get_checked<std::uint64_t>(v, key);
    else if (key == "trials") o.trials = get_checked<int>(v, key);
    else if (key == "out") o.out = get_checked<std::string>(v, key);
    else if (key == "threads") o.threads = get_checked<int>(v, key);
    else if (key == "check") o.check = get_checked<bool>(v, key);
    else throw ValidationError("unknown config key '" + key + "'");
  }
  return o;
}

ConfigOverrides ConfigOverrides::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

ConfigOverrides ConfigOverrides::from_environment() {
  ConfigOverrides o;
  if (const char* env = std::getenv(kThreadsEnvVar); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) {
      throw ValidationError(std::string(kThreadsEnvVar) + " must be a non-negative integer");
    }
    o.threads = static_cast<int>(v);
  }
  return o;
}

void ConfigOverrides::apply_to(RunConfig& c) const {
  if (n) c.n_sites = *n;
  if (j) c.coupling = *j;
  if (bmin) c.grid.b_min = *bmin;
  if (bmax) c.grid.b_max = *bmax;
  if (d) c.grid.levels = *d;
  if (oracle) c.oracle = parse_oracle_kind(*oracle);
  if (eps) c.epsilons = *eps;
  if (seed) c.seed = *seed;
  if (trials) c.trials = *trials;
  if (out) c.out_dir = *out;
  if (threads) c.threads = *threads;
  if (check) c.check = *check;
}

RunConfig resolve_config(const ConfigOverrides& environment, const ConfigOverrides& file,
                         const ConfigOverrides& flags) {
  RunConfig config;
  environment.apply_to(config);
  file.apply_to(config);
  flags.apply_to(config);
  return config;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

// ------------------------------------------------------------------- table

TableSummary summarize(const LookupTable& table) {
  TableSummary s;
  s.entries = table.size();
  if (table.entries.empty()) return s;
  std::vector<double> chis;
  for (const auto& e : table.entries) chis.push_back(e.chi_opt);
  s.chi_min = *std::min_element(chis.begin(), chis.end());
  s.chi_max = *std::max_element(chis.begin(), chis.end());
  s.chi_median = median(std::move(chis));
  return s;
}

TableRun cmd_table(const RunConfig& config, std::ostream& log) {
  config.validate();
  TableRun run{table_for(config), {}, {}};
  run.summary = summarize(run.table);
  write_file(config.out_dir / "fig2.csv", [&](std::ostream& out) { write_table_csv(out, run.table); });
  write_meta(config, "table", {});

  log << "table: " << run.summary.entries << " entries, chi_opt min " << fmt_short(run.summary.chi_min)
      << " median " << fmt_short(run.summary.chi_median) << " max " << fmt_short(run.summary.chi_max)
      << '\n';

  const std::uint64_t expected = target_count(config.grid, config.n_sites);
  run.checks.push_back(gate("entry count", run.table.size() == expected,
                            std::to_string(run.table.size()) + " of " + std::to_string(expected)));
  const TableEntry& first = run.table.entry_for(0);
  const bool id0_ok = std::abs(first.f - config.n_sites) <= 1e-9 && std::abs(first.chi_opt) <= 1e-9;
  run.checks.push_back(gate("target 0 matches candidate", id0_ok,
                            "F = " + fmt(first.f) + ", chi_opt = " + fmt(first.chi_opt)));
  if (run.table.candidate_degenerate) {
    log << "warning: candidate ground state is degenerate\n";
  }
  const auto degenerate = std::count_if(run.table.entries.begin(), run.table.entries.end(),
                                        [](const TableEntry& e) { return e.degenerate; });
  if (degenerate > 0) log << "warning: " << degenerate << " target ground states are degenerate\n";
  if (config.check) print_checks(log, run.checks);
  return run;
}

// ------------------------------------------------------------------- sweep

std::vector<SweepRow> sweep_rows(const RunConfig& config, const LookupTable& table) {
  const std::uint64_t count = target_count(config.grid, config.n_sites);
  const StateVector candidate = ground_state(config.candidate()).state;
  std::vector<SweepRow> rows(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    const auto id = static_cast<TargetId>(i);
    auto oracle = make_oracle(decode_target(id, config.grid, config.n_sites, config.coupling),
                              OracleKind::Exact, 1, derive_seed(config.seed, 0, id));
    const ProtocolReport report = run_protocol(candidate, *oracle, table);
    rows[i] = {id, report.f_before, report.delta_f_actual};
  });
  return rows;
}

SweepRun cmd_sweep(const RunConfig& config, std::ostream& log) {
  config.validate();
  const LookupTable table = table_for(config);
  SweepRun run;
  run.rows = sweep_rows(config, table);
  double total = 0.0;
  for (const auto& r : run.rows) total += r.delta_f;
  run.mean_delta_f = total / static_cast<double>(run.rows.size());

  write_file(config.out_dir / "fig3.csv", [&](std::ostream& out) { write_sweep_csv(out, run.rows); });
  write_meta(config, "sweep", {});
  log << "sweep: " << run.rows.size() << " targets, mean delta_F " << fmt_short(run.mean_delta_f)
      << '\n';

  const auto worst = std::min_element(run.rows.begin(), run.rows.end(),
                                      [](const SweepRow& a, const SweepRow& b) { return a.delta_f < b.delta_f; });
  run.checks.push_back(gate("delta_F non-negative", worst->delta_f >= -gates::kNonNegativeSlack,
                            "min delta_F = " + fmt(worst->delta_f)));
  const auto best = std::max_element(run.rows.begin(), run.rows.end(),
                                     [](const SweepRow& a, const SweepRow& b) { return a.delta_f < b.delta_f; });
  const double line = best->delta_f + best->f - config.n_sites;
  run.checks.push_back(gate("max delta_F on delta_F + F = N", std::abs(line) <= gates::kLineTolerance,
                            "target " + std::to_string(best->target_id) + ", residual " + fmt(line)));
  if (config.is_reference_setup()) {
    run.checks.push_back(gate("mean delta_F in [0.40, 0.50]",
                              run.mean_delta_f >= gates::kMeanDeltaFLow &&
                                  run.mean_delta_f <= gates::kMeanDeltaFHigh,
                              "mean = " + fmt(run.mean_delta_f) + " (reference value 0.45)"));
  }
  if (config.check) print_checks(log, run.checks);
  return run;
}

// ------------------------------------------------------------------- noise

NoiseRow noise_row(const RunConfig& config, const LookupTable& table, double epsilon,
                   std::uint64_t stream) {
  const int trials = config.noise_trials();
  const std::uint64_t count = target_count(config.grid, config.n_sites);
  const StateVector candidate = ground_state(config.candidate()).state;

  // Per-target sums, reduced afterwards in id order so the result ignores thread count.
  std::vector<double> chi_error(count), gain(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    const auto id = static_cast<TargetId>(i);
    const TableEntry& truth = table.entry_for(id);
    auto oracle = make_oracle(decode_target(id, config.grid, config.n_sites, config.coupling),
                              OracleKind::UniformNoise, trials,
                              derive_seed(config.seed, kNoiseStream + stream, id), epsilon);
    double err = 0.0, df = 0.0;
    for (int t = 0; t < trials; ++t) {
      const double chi = lookup_chi(table, oracle->query_noisy(candidate));
      err += std::abs(chi - truth.chi_opt);
      df += delta_f_planar(truth.thetas, chi);
    }
    chi_error[i] = err;
    gain[i] = df;
  });
  double err = 0.0, df = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    err += chi_error[i];
    df += gain[i];
  }
  const double samples = static_cast<double>(count) * trials;
  return {epsilon, err / samples, df / samples};
}

NoiseRun cmd_noise(const RunConfig& config, std::ostream& log) {
  config.validate();
  const LookupTable table = table_for(config);
  NoiseRun run;
  for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
    run.rows.push_back(noise_row(config, table, config.epsilons[e], e));
  }
  write_file(config.out_dir / "noise.csv", [&](std::ostream& out) { write_noise_csv(out, run.rows); });
  write_meta(config, "noise", {{"noise_distribution", "uniform(-eps, eps)"},
                               {"trials", config.noise_trials()}});

  for (const auto& r : run.rows) {
    log << "noise: eps " << fmt_short(r.epsilon) << "  mean |chi error| "
        << fmt_short(r.mean_abs_chi_error) << "  (Bloch angle " << fmt_short(2.0 * r.mean_abs_chi_error)
        << ")  mean delta_F " << fmt_short(r.mean_delta_f);
    if (r.epsilon == 0.05) log << "  reference 0.06";
    if (r.epsilon == 0.1) log << "  reference 0.08";
    log << '\n';
  }

  std::vector<NoiseRow> sorted = run.rows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const NoiseRow& a, const NoiseRow& b) { return a.epsilon < b.epsilon; });
  bool monotone = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    monotone = monotone && sorted[i].mean_abs_chi_error >= sorted[i - 1].mean_abs_chi_error;
  }
  run.checks.push_back(gate("chi error non-decreasing in eps", monotone, std::to_string(sorted.size()) + " bounds"));
  for (const auto& r : run.rows) {
    if (r.epsilon == 0.0) {
      run.checks.push_back(gate("eps 0 gives zero chi error", r.mean_abs_chi_error <= gates::kZeroNoiseSlack,
                                fmt(r.mean_abs_chi_error)));
    }
    if (!config.is_reference_setup()) continue;
    if (r.epsilon == 0.05 || r.epsilon == 0.1) {
      const double ref = r.epsilon == 0.05 ? gates::kChiErrorAt005 : gates::kChiErrorAt010;
      run.checks.push_back(gate("chi error at eps " + fmt_short(r.epsilon) + " within 0.03 of " + fmt_short(ref),
                                std::abs(r.mean_abs_chi_error - ref) <= gates::kChiErrorTolerance,
                                "mean |chi error| = " + fmt(r.mean_abs_chi_error)));
    }
  }
  if (config.check) print_checks(log, run.checks);
  return run;
}

// ----------------------------------------------------------------- measure

std::vector<MeasureRow> measure_rows(const RunConfig& config) {
  const int trials = config.measure_trials();
  const std::uint64_t count = target_count(config.grid, config.n_sites);
  const StateVector candidate = ground_state(config.candidate()).state;
  const std::vector<BlochVector> cand_bloch = site_bloch_vectors(candidate);

  std::vector<MeasureRow> rows(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    const auto id = static_cast<TargetId>(i);
    const ChainSpec spec = decode_target(id, config.grid, config.n_sites, config.coupling);

    const std::vector<BlochVector> target_bloch = site_bloch_vectors(ground_state(spec).state);
    double f_exact = 0.0, variance = 0.0;
    for (std::size_t k = 0; k < target_bloch.size(); ++k) {
      const double c = cos_theta(target_bloch[k], cand_bloch[k]);
      const double p = 0.5 * (c + 1.0);
      f_exact += c;
      variance += 4.0 * p * (1.0 - p);
    }

    auto oracle = make_oracle(spec, OracleKind::Measurement, trials,
                              derive_seed(config.seed, kMeasureStream, id));
    // Welford accumulation of the shot estimates.
    double mean = 0.0, m2 = 0.0;
    for (int t = 0; t < trials; ++t) {
      const double x = oracle->query_measured(candidate).first;
      const double delta = x - mean;
      mean += delta / (t + 1);
      m2 += delta * (x - mean);
    }
    const double std_dev = trials > 1 ? std::sqrt(m2 / (trials - 1)) : 0.0;
    rows[i] = {id, f_exact, mean, std_dev, std::sqrt(variance)};
  });
  return rows;
}

MeasureRun cmd_measure(const RunConfig& config, std::ostream& log) {
  config.validate();
  MeasureRun run;
  run.rows = measure_rows(config);
  write_file(config.out_dir / "measure.csv", [&](std::ostream& out) { write_measure_csv(out, run.rows); });
  write_meta(config, "measure", {{"trials", config.measure_trials()}, {"shots_per_query", 1}});

  const double bound = std::sqrt(static_cast<double>(config.n_sites));
  const double trials = config.measure_trials();
  double worst_std = 0.0, worst_rel = 0.0, worst_z = 0.0;
  std::size_t std_failures = 0, binomial_failures = 0, mean_failures = 0;
  for (const auto& r : run.rows) {
    worst_std = std::max(worst_std, r.f_est_std);
    if (r.f_est_std > bound) ++std_failures;

    const double dev = std::abs(r.f_est_std - r.binomial_std);
    const bool binomial_ok = r.binomial_std > 0.0
                                 ? dev <= gates::kBinomialRelTolerance * r.binomial_std
                                 : r.f_est_std == 0.0;
    if (r.binomial_std > 0.0) worst_rel = std::max(worst_rel, dev / r.binomial_std);
    if (!binomial_ok) ++binomial_failures;

    const double se = r.f_est_std / std::sqrt(trials);
    const double off = std::abs(r.f_est_mean - r.f_exact);
    const bool mean_ok = off <= gates::kMeanStandardErrors * se + 1e-9;
    if (se > 0.0) worst_z = std::max(worst_z, off / se);
    if (!mean_ok) ++mean_failures;
  }
  log << "measure: " << run.rows.size() << " targets x " << config.measure_trials()
      << " shots, max std " << fmt_short(worst_std) << " (bound " << fmt_short(bound)
      << "), worst relative std deviation from binomial " << fmt_short(worst_rel)
      << ", worst mean offset " << fmt_short(worst_z) << " standard errors\n";

  run.checks.push_back(gate("F_est std <= sqrt(N)", std_failures == 0,
                            std::to_string(std_failures) + " targets above " + fmt_short(bound)));
  run.checks.push_back(gate("F_est std within 5% of binomial", binomial_failures == 0,
                            std::to_string(binomial_failures) + " targets outside, worst " +
                                fmt_short(100.0 * worst_rel) + "%"));
  run.checks.push_back(gate("F_est mean within 3 standard errors", mean_failures == 0,
                            std::to_string(mean_failures) + " targets outside"));
  if (config.check) print_checks(log, run.checks);
  return run;
}

// --------------------------------------------------------------------- csv

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "target_id,F,delta_F\n";
  for (const auto& r : rows) out << r.target_id << ',' << fmt(r.f) << ',' << fmt(r.delta_f) << '\n';
}

void write_noise_csv(std::ostream& out, const std::vector<NoiseRow>& rows) {
  out << "epsilon,mean_abs_chi_error,mean_delta_f\n";
  for (const auto& r : rows) {
    out << fmt(r.epsilon) << ',' << fmt(r.mean_abs_chi_error) << ',' << fmt(r.mean_delta_f) << '\n';
  }
}

void write_measure_csv(std::ostream& out, const std::vector<MeasureRow>& rows) {
  out << "target_id,F_exact,F_est_mean,F_est_std,binomial_std\n";
  for (const auto& r : rows) {
    out << r.target_id << ',' << fmt(r.f_exact) << ',' << fmt(r.f_est_mean) << ','
        << fmt(r.f_est_std) << ',' << fmt(r.binomial_std) << '\n';
  }
}

}  // namespace qquiz
