#include "qquiz/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iterator>
#include <limits>
#include <numbers>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qquiz/errors.hpp"

namespace qquiz {
namespace {

constexpr double kPrefactorFloor = 1e-12;
constexpr double kIndeterminate = 1e-14;

void sort_entries(std::vector<TableEntry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const TableEntry& a, const TableEntry& b) {
    return a.f < b.f || (a.f == b.f && a.target_id < b.target_id);
  });
}

LookupTable empty_table(const ParameterGrid& grid, const ChainSpec& candidate, double coupling) {
  grid.validate();
  candidate.validate();
  if (candidate.coupling != coupling) {
    throw ValidationError("candidate coupling differs from the target coupling");
  }
  LookupTable table;
  table.grid = grid;
  table.candidate = candidate;
  table.n_sites = candidate.n_sites;
  table.coupling = coupling;
  return table;
}

}  // namespace

Operator global_rotation(double chi, int n, int max_sites) {
  return global_rotation(RotationParams{{0.0, 0.0, 1.0}, chi}, n, max_sites);
}

Operator global_rotation(const RotationParams& rotation, int n, int max_sites) {
  const BlochVector& b = rotation.axis;
  if (std::abs(b.norm() - 1.0) > 1e-12) throw ValidationError("rotation axis must be a unit vector");
  if (n < 1) throw ValidationError("chain size must be positive");
  // exp(-i chi b.sigma) = I cos chi - i (b.sigma) sin chi
  const double c = std::cos(rotation.chi);
  const double s = std::sin(rotation.chi);
  const Complex minus_i(0.0, -1.0);
  Operator site = Operator::identity(2);
  site *= c;
  site += (minus_i * s) * (Complex(b.x) * Operator::pauli(Pauli::X) +
                           Complex(b.y) * Operator::pauli(Pauli::Y) +
                           Complex(b.z) * Operator::pauli(Pauli::Z));
  Operator out = Operator::identity(1);
  for (int k = 0; k < n; ++k) out = kron(out, site, max_sites);
  return out;
}

double delta_f_general(std::span<const BlochVector> candidate, std::span<const BlochVector> target,
                       const BlochVector& axis, double chi) {
  if (candidate.size() != target.size()) throw ValidationError("chains differ in size");
  double sum = 0.0;
  for (std::size_t k = 0; k < candidate.size(); ++k) {
    const double nc = candidate[k].norm();
    const double nr = target[k].norm();
    if (nc < kDirectionFloor || nr < kDirectionFloor) {
      throw UndefinedDirectionError("Bloch vector below the direction floor");
    }
    const BlochVector c = candidate[k].scaled(1.0 / nc);
    const BlochVector r = target[k].scaled(1.0 / nr);
    const double cb = c.dot(axis);
    const double rb = r.dot(axis);
    const double prefactor = std::sqrt(std::max(0.0, (1.0 - cb * cb) * (1.0 - rb * rb)));
    if (prefactor < kPrefactorFloor) continue;
    // cos(gamma) = (cb rb - c.r) / prefactor; the sign of sin(gamma) follows the sense of
    // the in-plane angle from c to r, so gamma = pi - phi with phi signed about the axis.
    const double phi = std::atan2(axis.dot(c.cross(r)), c.dot(r) - cb * rb);
    const double gamma = std::numbers::pi - phi;
    sum += prefactor * std::sin(chi + gamma);
  }
  return 2.0 * std::sin(chi) * sum;
}

double delta_f_planar(std::span<const double> thetas, double chi) {
  double sum = 0.0;
  for (double t : thetas) sum += std::sin(t - chi);
  return 2.0 * std::sin(chi) * sum;
}

double delta_f_planar_derivative(std::span<const double> thetas, double chi) {
  double sum = 0.0;
  for (double t : thetas) sum += std::sin(t - 2.0 * chi);
  return 2.0 * sum;
}

double chi_opt(const AngleProfile& profile) {
  if (profile.thetas.empty()) throw ValidationError("angle profile is empty");
  if (std::abs(profile.sum_sin) < kIndeterminate && std::abs(profile.sum_cos) < kIndeterminate) {
    throw IndeterminateOptimumError("sum of sines and cosines vanish; every chi is stationary");
  }
  const double half = 0.5 * std::atan2(profile.sum_sin, profile.sum_cos);
  return half == -0.5 * std::numbers::pi ? 0.5 * std::numbers::pi : half;
}

const TableEntry& LookupTable::entry_for(TargetId id) const {
  for (const auto& e : entries)
    if (e.target_id == id) return e;
  throw IndexError("target id not in table");
}

TableEntry evaluate_target(TargetId id, const ChainSpec& target,
                           const StateVector& candidate_state) {
  const GroundState gs = ground_state(target);
  const ChainSimilarity sim = similarity_chain(gs.state, candidate_state);
  TableEntry entry;
  entry.target_id = id;
  entry.f = sim.f;
  entry.chi_opt = chi_opt(sim.profile);
  entry.delta_f = delta_f_planar(sim.profile.thetas, entry.chi_opt);
  entry.sum_sin = sim.profile.sum_sin;
  entry.thetas = sim.profile.thetas;
  entry.degenerate = gs.degenerate;
  return entry;
}

LookupTable build_table(const ParameterGrid& grid, const ChainSpec& candidate, double coupling,
                        int threads, std::uint64_t budget) {
  LookupTable table = empty_table(grid, candidate, coupling);
  const std::uint64_t count = target_count(grid, candidate.n_sites, budget);
  const GroundState cand = ground_state(candidate);
  table.candidate_degenerate = cand.degenerate;
  table.entries.resize(count);

  // Each slot is written by exactly one iteration; exceptions are captured and rethrown
  // for the lowest failing id so the error matches the serial path.
  std::vector<std::exception_ptr> failures(count);
  const auto n_targets = static_cast<std::int64_t>(count);
#ifdef _OPENMP
  const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(n_threads)
#else
  (void)threads;
#endif
  for (std::int64_t i = 0; i < n_targets; ++i) {
    const auto id = static_cast<TargetId>(i);
    try {
      table.entries[i] = evaluate_target(id, decode_target(id, grid, candidate.n_sites, coupling),
                                         cand.state);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  sort_entries(table.entries);
  return table;
}

LookupTable build_table_serial(const ParameterGrid& grid, const ChainSpec& candidate,
                               double coupling, std::uint64_t budget) {
  LookupTable table = empty_table(grid, candidate, coupling);
  const GroundState cand = ground_state(candidate);
  table.candidate_degenerate = cand.degenerate;
  for (const Target& t : enumerate_targets(grid, candidate.n_sites, coupling, budget)) {
    table.entries.push_back(evaluate_target(t.id, t.spec, cand.state));
  }
  sort_entries(table.entries);
  return table;
}

const TableEntry& lookup_entry(const LookupTable& table, double f_query) {
  const auto& e = table.entries;
  if (e.empty()) throw ValidationError("lookup table is empty");
  if (std::isnan(f_query)) throw ValidationError("similarity query is NaN");
  auto it = std::lower_bound(e.begin(), e.end(), f_query,
                             [](const TableEntry& x, double f) { return x.f < f; });
  // Nearest distance is attained at it or its predecessor.
  double best = std::numeric_limits<double>::infinity();
  if (it != e.end()) best = std::abs(it->f - f_query);
  if (it != e.begin()) best = std::min(best, std::abs(std::prev(it)->f - f_query));

  // Entries at exactly that distance form at most two contiguous runs around `it`.
  const TableEntry* chosen = nullptr;
  auto consider = [&](const TableEntry& x) {
    if (std::abs(x.f - f_query) == best && (!chosen || x.target_id < chosen->target_id)) chosen = &x;
  };
  for (auto j = it; j != e.end() && std::abs(j->f - f_query) == best; ++j) consider(*j);
  for (auto j = it; j != e.begin();) {
    --j;
    if (std::abs(j->f - f_query) != best) break;
    consider(*j);
  }
  return *chosen;
}

double lookup_chi(const LookupTable& table, double f_query) {
  return lookup_entry(table, f_query).chi_opt;
}

void write_table_csv(std::ostream& out, const LookupTable& table) {
  out << "target_id,F,chi_opt,delta_F,sum_sin\n";
  char line[160];
  for (const auto& e : table.entries) {
    std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(e.target_id), e.f, e.chi_opt, e.delta_f,
                  e.sum_sin);
    out << line;
  }
}

void ProtocolConfig::validate() const {
  if (max_queries < 1) throw ValidationError("protocol needs at least one query");
  if (std::abs(axis.x) > 1e-12 || std::abs(axis.y) > 1e-12 || std::abs(std::abs(axis.z) - 1.0) > 1e-12) {
    throw ValidationError("only rotations about +z or -z are supported");
  }
  if (!(epsilon >= 0.0)) throw ValidationError("noise bound must be non-negative");
}

ProtocolReport run_protocol(const ChainSpec& candidate, SimilarityOracle& oracle,
                            const LookupTable& table, const ProtocolConfig& config) {
  if (!(candidate == table.candidate)) {
    throw ValidationError("candidate does not match the chain the table was built for");
  }
  return run_protocol(ground_state(candidate).state, oracle, table, config);
}

ProtocolReport run_protocol(const StateVector& candidate_state, SimilarityOracle& oracle,
                            const LookupTable& table, const ProtocolConfig& config) {
  config.validate();
  if (candidate_state.n_sites() != table.n_sites) {
    throw ValidationError("candidate size does not match the table");
  }
  if (oracle.remaining_budget() < 1) throw QueryBudgetError("oracle query budget exhausted");

  ProtocolReport report;
  report.f_before = oracle.query(candidate_state);
  report.queries_used = 1;

  const TableEntry& match = lookup_entry(table, report.f_before);
  report.matched_entry = match.target_id;
  report.delta_f_analytic = match.delta_f;
  // The table angle is about +z; a rotation by -chi about -z is the same unitary.
  report.chi_applied = config.axis.z > 0.0 ? match.chi_opt : -match.chi_opt;

  const Operator u = global_rotation(RotationParams{config.axis, report.chi_applied},
                                     candidate_state.n_sites());
  const StateVector rotated = apply_unitary(u, candidate_state);
  report.f_after = oracle.verify(rotated);
  report.f_before_exact = oracle.verify(candidate_state);
  report.delta_f_actual = report.f_after - report.f_before;
  return report;
}

}  // namespace qquiz
