#pragma once

// Periodic spin-1/2 chain H = sum_k (X_k + b_k Y_k + J Z_k Z_{k+1}), site N+1 == site 1.

#include <cstdint>
#include <functional>
#include <vector>

#include "qquiz/hilbert.hpp"

namespace qquiz {

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
  BlochVector cross(const BlochVector& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const;
  BlochVector scaled(double s) const { return {x * s, y * s, z * s}; }
  friend BlochVector operator-(const BlochVector& a, const BlochVector& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
};

struct ChainSpec {
  int n_sites = 4;
  double coupling = 1.0;
  std::vector<double> fields;

  static ChainSpec uniform(int n_sites, double coupling, double field) {
    return {n_sites, coupling, std::vector<double>(static_cast<std::size_t>(n_sites), field)};
  }
  /// Throws ValidationError if n_sites < 2 or the field count differs from n_sites.
  void validate() const;
  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

/// Equally spaced field values b_min + i (b_max - b_min) / (D - 1).
/// A single level is allowed and yields just b_min.
struct ParameterGrid {
  double b_min = -0.5;
  double b_max = 0.5;
  int levels = 5;

  void validate() const;
  double value(int i) const;
  friend bool operator==(const ParameterGrid&, const ParameterGrid&) = default;
};

using TargetId = std::uint64_t;

/// Largest number of targets a sweep may enumerate unless overridden.
inline constexpr std::uint64_t kDefaultSweepBudget = std::uint64_t{1} << 20;

Operator build_hamiltonian(const ChainSpec& spec, int max_sites = kDefaultMaxSites);

/// Exact ground state; the degeneracy flag of the eigensolve is carried in the result.
GroundState ground_state(const ChainSpec& spec, int max_sites = kDefaultMaxSites);

/// Ground-state Bloch vector of the single-site Hamiltonian X + bY: -(1, b, 0)/sqrt(1+b^2).
BlochVector product_ground_bloch(double b);

/// Single-site ground state of X + bY as a 2-amplitude state with the library phase convention.
StateVector product_ground_site(double b);

/// Number of targets D^n; throws CapacityError above `budget`.
std::uint64_t target_count(const ParameterGrid& grid, int n,
                           std::uint64_t budget = kDefaultSweepBudget);

/// Base-D little-endian decode (site 1 is the least significant digit).
ChainSpec decode_target(TargetId id, const ParameterGrid& grid, int n, double coupling);
TargetId encode_target(const std::vector<int>& levels, int base);

struct Target {
  TargetId id;
  ChainSpec spec;
};

/// All D^n targets in increasing id order.
std::vector<Target> enumerate_targets(const ParameterGrid& grid, int n, double coupling = 1.0,
                                      std::uint64_t budget = kDefaultSweepBudget);

}  // namespace qquiz
