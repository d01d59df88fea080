#pragma once

// Single-query protocol: precompute chi_opt for every possible target, ask the oracle for F
// once, look up the matching chi and rotate the candidate by exp(-i chi sum_k Z_k).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qquiz/chain.hpp"
#include "qquiz/hilbert.hpp"
#include "qquiz/oracle.hpp"
#include "qquiz/similarity.hpp"

namespace qquiz {

/// chi is the half-angle: the Bloch vectors turn by 2 chi about `axis`.
struct RotationParams {
  BlochVector axis{0.0, 0.0, 1.0};
  double chi = 0.0;
};

/// exp(-i chi sum_k Z_k) on n sites.
Operator global_rotation(double chi, int n, int max_sites = kDefaultMaxSites);

/// exp(-i chi sum_k (axis . sigma_k)) for a unit axis.
Operator global_rotation(const RotationParams& rotation, int n, int max_sites = kDefaultMaxSites);

/// Similarity change for a rotation about an arbitrary axis, from the Bloch vectors before it.
double delta_f_general(std::span<const BlochVector> candidate, std::span<const BlochVector> target,
                       const BlochVector& axis, double chi);

/// 2 sin(chi) sum_k sin(theta_k - chi).
double delta_f_planar(std::span<const double> thetas, double chi);

/// d/dchi of delta_f_planar: 2 sum_k sin(theta_k - 2 chi).
double delta_f_planar_derivative(std::span<const double> thetas, double chi);

/// Circular mean half-angle 1/2 atan2(sum sin, sum cos), in (-pi/2, pi/2].
double chi_opt(const AngleProfile& profile);

struct TableEntry {
  TargetId target_id = 0;
  double f = 0.0;
  double chi_opt = 0.0;
  double delta_f = 0.0;
  double sum_sin = 0.0;
  std::vector<double> thetas;
  bool degenerate = false;  ///< target ground state gap below kDegeneracyGap
};

struct LookupTable {
  std::vector<TableEntry> entries;  ///< ascending F, ties by target_id
  ParameterGrid grid;
  ChainSpec candidate;
  int n_sites = 0;
  double coupling = 0.0;
  bool candidate_degenerate = false;

  std::size_t size() const { return entries.size(); }
  /// Entry for a target id (linear scan).
  const TableEntry& entry_for(TargetId id) const;
};

/// One table row, computed from the target's exact ground state.
TableEntry evaluate_target(TargetId id, const ChainSpec& target,
                           const StateVector& candidate_state);

/// Table over all D^N targets, targets evaluated in parallel with OpenMP.
/// `threads` <= 0 uses the OpenMP default.
LookupTable build_table(const ParameterGrid& grid, const ChainSpec& candidate, double coupling,
                        int threads = 0, std::uint64_t budget = kDefaultSweepBudget);

/// Serial reference for build_table; results are identical.
LookupTable build_table_serial(const ParameterGrid& grid, const ChainSpec& candidate,
                               double coupling, std::uint64_t budget = kDefaultSweepBudget);

/// Entry whose F is closest to f_query, smallest target_id on ties.
const TableEntry& lookup_entry(const LookupTable& table, double f_query);
double lookup_chi(const LookupTable& table, double f_query);

/// CSV with header target_id,F,chi_opt,delta_F,sum_sin; floats printed with 17 significant digits.
void write_table_csv(std::ostream& out, const LookupTable& table);

struct ProtocolConfig {
  int max_queries = 1;
  BlochVector axis{0.0, 0.0, 1.0};  ///< +z or -z
  OracleKind oracle_kind = OracleKind::Exact;
  double epsilon = 0.0;
  std::uint64_t seed = 42;

  void validate() const;
};

struct ProtocolReport {
  double f_before = 0.0;          ///< oracle reply
  double chi_applied = 0.0;       ///< about config.axis
  double f_after = 0.0;           ///< diagnostic, from the verification channel
  double delta_f_analytic = 0.0;  ///< gain predicted by the matched table entry
  double delta_f_actual = 0.0;    ///< f_after - f_before
  double f_before_exact = 0.0;    ///< diagnostic, from the verification channel
  int queries_used = 0;
  TargetId matched_entry = 0;
};

/// Runs the M = 1 strategy. Only the oracle's scalar replies are consulted.
ProtocolReport run_protocol(const ChainSpec& candidate, SimilarityOracle& oracle,
                            const LookupTable& table, const ProtocolConfig& config = {});

/// Same, reusing an already solved candidate ground state.
ProtocolReport run_protocol(const StateVector& candidate_state, SimilarityOracle& oracle,
                            const LookupTable& table, const ProtocolConfig& config = {});

}  // namespace qquiz
