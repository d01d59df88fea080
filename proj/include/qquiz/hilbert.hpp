#pragma once

// Dense complex linear algebra on the 2^N-dimensional spin Hilbert space.
//
// Basis ordering: site 1 is the leftmost Kronecker factor, so it owns the most
// significant bit of a basis index. |1 0> on two sites is index 2.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace qquiz {

using Complex = std::complex<double>;

/// Largest chain handled by the dense representation unless a caller overrides it.
inline constexpr int kDefaultMaxSites = 10;

enum class Pauli { I, X, Y, Z };

/// Square complex matrix stored row-major.
class Operator {
 public:
  Operator() = default;
  explicit Operator(std::size_t dim, bool hermitian_hint = false);
  Operator(std::size_t dim, std::vector<Complex> entries, bool hermitian_hint = false);

  static Operator identity(std::size_t dim);
  static Operator pauli(Pauli p);

  std::size_t dim() const { return dim_; }
  bool hermitian_hint() const { return hermitian_hint_; }

  Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }
  std::span<const Complex> entries() const { return entries_; }

  Complex trace() const;
  Operator adjoint() const;
  /// max |A - A^dagger| over entries.
  double hermiticity_defect() const;
  /// max |A^dagger A - I| over entries.
  double unitarity_defect() const;

  Operator& operator+=(const Operator& other);
  Operator& operator*=(Complex scale);
  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
  bool hermitian_hint_ = false;
};

/// Normalized pure state of n_sites qubits.
class StateVector {
 public:
  /// Throws ValidationError unless the length is 2^n_sites and the norm is 1 within 1e-10.
  StateVector(int n_sites, std::vector<Complex> amplitudes);

  /// Computational basis state; `bits` uses the same ordering as basis indices.
  static StateVector basis(int n_sites, std::size_t index);
  /// Kronecker product of two states (a on the leading sites).
  static StateVector product(const StateVector& a, const StateVector& b);

  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;
  Complex inner(const StateVector& other) const;  ///< <this|other>

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  int n_sites_;
  std::vector<Complex> amplitudes_;
};

/// Set of sites, site k stored in bit k-1.
class SubsetMask {
 public:
  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(std::uint32_t bits) : bits_(bits) {}
  static SubsetMask of_sites(std::initializer_list<int> sites);
  static SubsetMask site(int k) { return SubsetMask(std::uint32_t{1} << (k - 1)); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(int k) const { return (bits_ >> (k - 1)) & 1u; }
  int cardinality() const;
  bool empty() const { return bits_ == 0; }
  /// Kept sites in ascending order.
  std::vector<int> sites() const;

  friend constexpr bool operator==(SubsetMask, SubsetMask) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Reduced state of a subset of sites; the lowest kept site is the leading factor.
class DensityMatrix {
 public:
  DensityMatrix(int n_kept, Operator entries);

  int n_kept() const { return n_kept_; }
  std::size_t dim() const { return entries_.dim(); }
  const Operator& op() const { return entries_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_(r, c); }

  Complex trace() const { return entries_.trace(); }
  double purity() const;                                   ///< tr(rho^2)
  double overlap(const DensityMatrix& other) const;        ///< Re tr(rho sigma)
  /// Eigenvalues in ascending order.
  std::vector<double> eigenvalues() const;

  static DensityMatrix pure(const StateVector& psi);

 private:
  int n_kept_;
  Operator entries_;
};

/// Hermitian eigendecomposition, eigenvalues ascending; column j of `vectors` pairs with values[j].
struct EigenSystem {
  std::vector<double> values;
  Operator vectors;
};

struct GroundState {
  double energy;
  StateVector state;
  double gap;               ///< E1 - E0; 0 for a 1-dimensional space
  bool degenerate = false;  ///< gap below kDegeneracyGap
};

inline constexpr double kDegeneracyGap = 1e-8;

Operator kron(const Operator& a, const Operator& b, int max_sites = kDefaultMaxSites);

/// I x ... x p x ... x I with p on site k (1-based) of an n-site chain.
Operator site_operator(Pauli p, int k, int n, int max_sites = kDefaultMaxSites);

/// Cyclic complex Jacobi diagonalization. Throws ValidationError for non-Hermitian input.
EigenSystem hermitian_eigensystem(const Operator& h);

/// Lowest eigenpair with the phase fixed so the first nonzero amplitude is real positive.
GroundState hermitian_ground_state(const Operator& h);

DensityMatrix partial_trace(const StateVector& state, SubsetMask keep);

/// Throws ValidationError unless u is unitary within 1e-10.
StateVector apply_unitary(const Operator& u, const StateVector& state);

/// Real part of <v|h|v> / <v|v>.
double rayleigh_quotient(const Operator& h, std::span<const Complex> v);

}  // namespace qquiz
