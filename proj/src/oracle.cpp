#include "qquiz/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "qquiz/errors.hpp"
#include "qquiz/similarity.hpp"

namespace qquiz {
namespace {

std::uint64_t hash_double(std::uint64_t h, double x) {
  return splitmix64(h ^ std::bit_cast<std::uint64_t>(x));
}

std::uint64_t fingerprint_of(const ChainSpec& spec, OracleKind kind, int budget,
                             std::uint64_t seed, double epsilon) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(spec.n_sites));
  h = hash_double(h, spec.coupling);
  for (double b : spec.fields) h = hash_double(h, b);
  h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
  h = splitmix64(h ^ static_cast<std::uint64_t>(budget));
  h = splitmix64(h ^ seed);
  return hash_double(h, epsilon);
}

}  // namespace

const char* to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::Exact: return "exact";
    case OracleKind::UniformNoise: return "uniform-noise";
    case OracleKind::Measurement: return "measurement";
  }
  return "unknown";
}

OracleKind parse_oracle_kind(const std::string& name) {
  if (name == "exact") return OracleKind::Exact;
  if (name == "uniform-noise" || name == "noisy") return OracleKind::UniformNoise;
  if (name == "measurement") return OracleKind::Measurement;
  throw ValidationError("unknown oracle kind '" + name + "'");
}

Oracle::Oracle(OracleKind kind, StateVector target, int budget, std::uint64_t seed,
               double epsilon, std::uint64_t fingerprint)
    : kind_(kind),
      target_(std::move(target)),
      budget_(budget),
      epsilon_(epsilon),
      fingerprint_(fingerprint),
      engine_(seed) {
  for (int k = 1; k <= target_.n_sites(); ++k) {
    target_sites_.push_back(partial_trace(target_, SubsetMask::site(k)));
  }
}

std::unique_ptr<Oracle> make_oracle(const ChainSpec& target, OracleKind kind, int budget,
                                    std::uint64_t seed, double epsilon) {
  target.validate();
  if (budget < 0) throw ValidationError("oracle budget cannot be negative");
  if (!(epsilon >= 0.0)) throw ValidationError("noise bound must be non-negative");
  GroundState gs = ground_state(target);
  return std::unique_ptr<Oracle>(new Oracle(kind, std::move(gs.state), budget, seed, epsilon,
                                            fingerprint_of(target, kind, budget, seed, epsilon)));
}

void Oracle::charge() {
  if (budget_ <= 0) throw QueryBudgetError("oracle query budget exhausted");
  --budget_;
}

const std::vector<double>& Oracle::site_cosines(const StateVector& candidate) {
  if (candidate.n_sites() != target_.n_sites()) {
    throw ValidationError("candidate and hidden target differ in size");
  }
  const auto amps = candidate.amplitudes();
  if (cached_candidate_.size() == amps.size() &&
      std::equal(amps.begin(), amps.end(), cached_candidate_.begin())) {
    return cached_cosines_;
  }
  std::vector<double> cosines;
  cosines.reserve(target_sites_.size());
  for (int k = 1; k <= candidate.n_sites(); ++k) {
    cosines.push_back(cos_theta(target_sites_[k - 1], partial_trace(candidate, SubsetMask::site(k))));
  }
  cached_candidate_.assign(amps.begin(), amps.end());
  cached_cosines_ = std::move(cosines);
  return cached_cosines_;
}

double Oracle::exact_similarity(const StateVector& candidate) {
  double f = 0.0;
  for (double c : site_cosines(candidate)) f += c;
  return f;
}

double Oracle::query(const StateVector& candidate) {
  switch (kind_) {
    case OracleKind::Exact: return query_exact(candidate);
    case OracleKind::UniformNoise: return query_noisy(candidate);
    case OracleKind::Measurement: return query_measured(candidate).first;
  }
  throw ValidationError("unknown oracle kind");
}

double Oracle::verify(const StateVector& candidate) { return exact_similarity(candidate); }

double Oracle::query_exact(const StateVector& candidate) {
  const double f = exact_similarity(candidate);
  charge();
  return f;
}

double Oracle::query_noisy(const StateVector& candidate) {
  const double f = exact_similarity(candidate);
  charge();
  if (epsilon_ == 0.0) return f;
  return f + epsilon_ * (2.0 * uniform_open01(engine_) - 1.0);
}

std::pair<double, MeasurementRecord> Oracle::query_measured(const StateVector& candidate) {
  const std::vector<double>& cosines = site_cosines(candidate);
  charge();
  MeasurementRecord record;
  record.m.reserve(cosines.size());
  int ones = 0;
  for (double c : cosines) {
    const double p = 0.5 * (c + 1.0);
    const std::uint8_t bit = uniform_open01(engine_) < p ? 1 : 0;
    record.m.push_back(bit);
    ones += bit;
  }
  record.f_estimate = 2.0 * ones - static_cast<double>(cosines.size());
  return {record.f_estimate, std::move(record)};
}

}  // namespace qquiz
