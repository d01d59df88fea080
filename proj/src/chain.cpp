#include "qquiz/chain.hpp"

#include <cmath>
#include <string>

#include "qquiz/errors.hpp"

namespace qquiz {

double BlochVector::norm() const { return std::sqrt(dot(*this)); }

void ChainSpec::validate() const {
  if (n_sites < 2) throw ValidationError("chain needs at least two sites");
  if (fields.size() != static_cast<std::size_t>(n_sites)) {
    throw ValidationError("field count " + std::to_string(fields.size()) +
                          " does not match chain size " + std::to_string(n_sites));
  }
  if (!std::isfinite(coupling)) throw ValidationError("coupling must be finite");
  for (double b : fields)
    if (!std::isfinite(b)) throw ValidationError("fields must be finite");
}

void ParameterGrid::validate() const {
  if (levels < 1) throw ValidationError("grid needs at least one level");
  if (levels > 1 && !(b_min < b_max)) throw ValidationError("grid requires b_min < b_max");
}

double ParameterGrid::value(int i) const {
  if (i < 0 || i >= levels) throw IndexError("grid level out of range");
  if (levels == 1) return b_min;
  if (i == levels - 1) return b_max;
  return b_min + i * (b_max - b_min) / (levels - 1);
}

Operator build_hamiltonian(const ChainSpec& spec, int max_sites) {
  spec.validate();
  const int n = spec.n_sites;
  if (n > max_sites) {
    throw CapacityError("chain of " + std::to_string(n) + " sites exceeds dense cap of " +
                        std::to_string(max_sites));
  }
  Operator h(std::size_t{1} << n, true);
  for (int k = 1; k <= n; ++k) {
    const int next = k % n + 1;
    h += site_operator(Pauli::X, k, n, max_sites);
    h += spec.fields[k - 1] * site_operator(Pauli::Y, k, n, max_sites);
    h += spec.coupling * (site_operator(Pauli::Z, k, n, max_sites) *
                          site_operator(Pauli::Z, next, n, max_sites));
  }
  return h;
}

GroundState ground_state(const ChainSpec& spec, int max_sites) {
  return hermitian_ground_state(build_hamiltonian(spec, max_sites));
}

BlochVector product_ground_bloch(double b) {
  const double r = std::sqrt(1.0 + b * b);
  return {-1.0 / r, -b / r, 0.0};
}

StateVector product_ground_site(double b) {
  // X + bY = [[0, 1 - ib], [1 + ib, 0]]; eigenvalue -r has eigenvector (1, -(1+ib)/r)/sqrt2.
  const double r = std::sqrt(1.0 + b * b);
  const double s = 1.0 / std::sqrt(2.0);
  return StateVector(1, {Complex(s, 0.0), -Complex(1.0, b) * (s / r)});
}

std::uint64_t target_count(const ParameterGrid& grid, int n, std::uint64_t budget) {
  grid.validate();
  if (n < 1) throw ValidationError("chain size must be positive");
  std::uint64_t count = 1;
  for (int i = 0; i < n; ++i) {
    count *= static_cast<std::uint64_t>(grid.levels);
    if (count > budget) {
      throw CapacityError("D^N targets exceed the sweep budget of " + std::to_string(budget));
    }
  }
  return count;
}

ChainSpec decode_target(TargetId id, const ParameterGrid& grid, int n, double coupling) {
  ChainSpec spec{n, coupling, std::vector<double>(static_cast<std::size_t>(n))};
  const auto base = static_cast<TargetId>(grid.levels);
  for (int k = 0; k < n; ++k) {
    spec.fields[k] = grid.value(static_cast<int>(id % base));
    id /= base;
  }
  if (id != 0) throw IndexError("target id out of range for grid");
  return spec;
}

TargetId encode_target(const std::vector<int>& levels, int base) {
  TargetId id = 0;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (*it < 0 || *it >= base) throw IndexError("grid level out of range");
    id = id * static_cast<TargetId>(base) + static_cast<TargetId>(*it);
  }
  return id;
}

std::vector<Target> enumerate_targets(const ParameterGrid& grid, int n, double coupling,
                                      std::uint64_t budget) {
  const std::uint64_t count = target_count(grid, n, budget);
  std::vector<Target> out;
  out.reserve(count);
  for (TargetId id = 0; id < count; ++id) out.push_back({id, decode_target(id, grid, n, coupling)});
  return out;
}

}  // namespace qquiz
