#pragma once

// Black-box similarity oracles. The protocol runner sees only SimilarityOracle: a scalar
// reply per query and a budget. Target parameters and states never leave the oracle.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qquiz/chain.hpp"
#include "qquiz/hilbert.hpp"
#include "qquiz/rng.hpp"

namespace qquiz {

class SimilarityOracle {
 public:
  virtual ~SimilarityOracle() = default;

  /// One budgeted similarity query against the hidden target.
  virtual double query(const StateVector& candidate) = 0;
  /// Exact similarity on the diagnostic channel. Never charged to the budget and never
  /// used to make protocol decisions.
  virtual double verify(const StateVector& candidate) = 0;
  virtual int remaining_budget() const = 0;
};

enum class OracleKind { Exact, UniformNoise, Measurement };

const char* to_string(OracleKind kind);
OracleKind parse_oracle_kind(const std::string& name);

struct MeasurementRecord {
  std::vector<std::uint8_t> m;  ///< m_k = 1 when site k is found in the target's state
  double f_estimate = 0.0;      ///< 2 sum m_k - N
};

class Oracle final : public SimilarityOracle {
 public:
  double query(const StateVector& candidate) override;
  double verify(const StateVector& candidate) override;
  int remaining_budget() const override { return budget_; }

  double query_exact(const StateVector& candidate);
  /// F + u with u uniform on (-eps, eps).
  double query_noisy(const StateVector& candidate);
  /// One projective measurement per site; P(m_k = 1) = (cos theta_k + 1) / 2.
  std::pair<double, MeasurementRecord> query_measured(const StateVector& candidate);

  OracleKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  /// Hash of the construction parameters; identifies the oracle without revealing them.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  friend std::unique_ptr<Oracle> make_oracle(const ChainSpec&, OracleKind, int, std::uint64_t,
                                             double);
  Oracle(OracleKind kind, StateVector target, int budget, std::uint64_t seed,
         double epsilon, std::uint64_t fingerprint);

  void charge();
  const std::vector<double>& site_cosines(const StateVector& candidate);
  double exact_similarity(const StateVector& candidate);

  OracleKind kind_;
  StateVector target_;
  std::vector<DensityMatrix> target_sites_;
  int budget_;
  double epsilon_;
  std::uint64_t fingerprint_;
  Engine engine_;

  // Most recent candidate and its per-site cosines; repeated shots reuse them.
  std::vector<Complex> cached_candidate_;
  std::vector<double> cached_cosines_;
};

/// Solves the target ground state once and hides it behind the query interface.
/// `epsilon` is used only by OracleKind::UniformNoise.
std::unique_ptr<Oracle> make_oracle(const ChainSpec& target, OracleKind kind, int budget,
                                    std::uint64_t seed, double epsilon = 0.0);

}  // namespace qquiz
