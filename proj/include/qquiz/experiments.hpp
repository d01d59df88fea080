#pragma once

// End-to-end experiments behind the `qquiz` command line tool. Every command writes its CSV
// into RunConfig::out_dir and returns the numbers it wrote, plus a list of gate results
// that `--check` mode turns into an exit status.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qquiz/chain.hpp"
#include "qquiz/errors.hpp"
#include "qquiz/oracle.hpp"
#include "qquiz/protocol.hpp"

namespace qquiz {

/// Failure to create or write an output file.
class IoError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kDefaultNoiseTrials = 200;
inline constexpr int kDefaultMeasureTrials = 10000;
inline constexpr const char* kThreadsEnvVar = "QQUIZ_THREADS";

struct RunConfig {
  int n_sites = 4;
  double coupling = 1.0;
  ParameterGrid grid{};
  OracleKind oracle = OracleKind::Exact;
  std::vector<double> epsilons{0.0, 0.05, 0.1};
  std::uint64_t seed = 42;
  std::optional<int> trials;  ///< unset: per-command default
  std::filesystem::path out_dir = ".";
  int threads = 0;  ///< <= 0: OpenMP default
  bool check = false;

  /// Throws ValidationError for anything the modules would reject.
  void validate() const;
  /// The candidate chain: every field at the grid minimum.
  ChainSpec candidate() const;
  /// N = 4, J = 1 and the five-level grid on [-0.5, 0.5].
  bool is_reference_setup() const;
  int noise_trials() const { return trials.value_or(kDefaultNoiseTrials); }
  int measure_trials() const { return trials.value_or(kDefaultMeasureTrials); }
};

/// Partially specified configuration, one optional per key. Keys match the flag names.
struct ConfigOverrides {
  std::optional<int> n;
  std::optional<double> j;
  std::optional<double> bmin;
  std::optional<double> bmax;
  std::optional<int> d;
  std::optional<std::string> oracle;
  std::optional<std::vector<double>> eps;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<bool> check;

  /// Throws ValidationError on unknown keys or mistyped values.
  static ConfigOverrides from_json(const nlohmann::json& j);
  static ConfigOverrides from_file(const std::filesystem::path& path);
  /// Reads kThreadsEnvVar when set.
  static ConfigOverrides from_environment();
  void apply_to(RunConfig& config) const;
};

/// defaults < environment < config file < flags
RunConfig resolve_config(const ConfigOverrides& environment, const ConfigOverrides& file,
                         const ConfigOverrides& flags);

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

bool all_passed(const std::vector<CheckResult>& checks);

struct TableSummary {
  std::size_t entries = 0;
  double chi_min = 0.0;
  double chi_median = 0.0;
  double chi_max = 0.0;
};

TableSummary summarize(const LookupTable& table);

struct SweepRow {
  TargetId target_id;
  double f;
  double delta_f;
};

struct NoiseRow {
  double epsilon;
  double mean_abs_chi_error;
  double mean_delta_f;
};

struct MeasureRow {
  TargetId target_id;
  double f_exact;
  double f_est_mean;
  double f_est_std;  ///< sample standard deviation (n - 1)
  double binomial_std;
};

struct TableRun {
  LookupTable table;
  TableSummary summary;
  std::vector<CheckResult> checks;
};

struct SweepRun {
  std::vector<SweepRow> rows;  ///< ascending target_id
  double mean_delta_f = 0.0;
  std::vector<CheckResult> checks;
};

struct NoiseRun {
  std::vector<NoiseRow> rows;
  std::vector<CheckResult> checks;
};

struct MeasureRun {
  std::vector<MeasureRow> rows;  ///< ascending target_id
  std::vector<CheckResult> checks;
};

/// Run the protocol against an exact oracle for every target (parallel over targets).
std::vector<SweepRow> sweep_rows(const RunConfig& config, const LookupTable& table);

/// Noisy-lookup study for one noise bound; `stream` separates the random streams of
/// different bounds.
NoiseRow noise_row(const RunConfig& config, const LookupTable& table, double epsilon,
                   std::uint64_t stream);

std::vector<MeasureRow> measure_rows(const RunConfig& config);

TableRun cmd_table(const RunConfig& config, std::ostream& log);
SweepRun cmd_sweep(const RunConfig& config, std::ostream& log);
NoiseRun cmd_noise(const RunConfig& config, std::ostream& log);
MeasureRun cmd_measure(const RunConfig& config, std::ostream& log);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_noise_csv(std::ostream& out, const std::vector<NoiseRow>& rows);
void write_measure_csv(std::ostream& out, const std::vector<MeasureRow>& rows);

/// Gate thresholds applied by `--check`.
namespace gates {
inline constexpr double kMeanDeltaFLow = 0.40;
inline constexpr double kMeanDeltaFHigh = 0.50;
inline constexpr double kLineTolerance = 1e-6;
inline constexpr double kNonNegativeSlack = 1e-9;
// cyclic shifts of a target share F up to rounding, so the lookup may land on a twin
inline constexpr double kZeroNoiseSlack = 1e-12;
inline constexpr double kChiErrorTolerance = 0.03;
inline constexpr double kChiErrorAt005 = 0.06;
inline constexpr double kChiErrorAt010 = 0.08;
inline constexpr double kBinomialRelTolerance = 0.05;
inline constexpr double kMeanStandardErrors = 3.0;
}  // namespace gates

}  // namespace qquiz
