#include "qquiz/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "qquiz/errors.hpp"

namespace qquiz {
namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kHermitianTolerance = 1e-12;
constexpr double kUnitaryTolerance = 1e-10;
constexpr int kMaxJacobiSweeps = 100;

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

void check_capacity(std::size_t dim, int max_sites) {
  if (dim > (std::size_t{1} << max_sites)) {
    throw CapacityError("dense dimension " + std::to_string(dim) + " exceeds 2^" +
                        std::to_string(max_sites));
  }
}

}  // namespace

// ---------------------------------------------------------------- Operator

Operator::Operator(std::size_t dim, bool hermitian_hint)
    : dim_(dim), entries_(dim * dim), hermitian_hint_(hermitian_hint) {}

Operator::Operator(std::size_t dim, std::vector<Complex> entries, bool hermitian_hint)
    : dim_(dim), entries_(std::move(entries)), hermitian_hint_(hermitian_hint) {
  if (entries_.size() != dim_ * dim_) {
    throw ValidationError("operator entries do not form a square matrix");
  }
  if (hermitian_hint_ && hermiticity_defect() >= kHermitianTolerance) {
    throw ValidationError("operator marked Hermitian is not Hermitian");
  }
}

Operator Operator::identity(std::size_t dim) {
  Operator out(dim, true);
  for (std::size_t i = 0; i < dim; ++i) out(i, i) = 1.0;
  return out;
}

Operator Operator::pauli(Pauli p) {
  using namespace std::complex_literals;
  switch (p) {
    case Pauli::I: return identity(2);
    case Pauli::X: return Operator(2, {0.0, 1.0, 1.0, 0.0}, true);
    case Pauli::Y: return Operator(2, {0.0, -1i, 1i, 0.0}, true);
    case Pauli::Z: return Operator(2, {1.0, 0.0, 0.0, -1.0}, true);
  }
  throw ValidationError("unknown Pauli label");
}

Complex Operator::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

Operator Operator::adjoint() const {
  Operator out(dim_, hermitian_hint_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double Operator::hermiticity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return worst;
}

double Operator::unitarity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) acc += std::conj((*this)(k, i)) * (*this)(k, j);
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

Operator& Operator::operator+=(const Operator& other) {
  if (other.dim_ != dim_) throw ValidationError("operator dimension mismatch in sum");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  hermitian_hint_ = hermitian_hint_ && other.hermitian_hint_;
  return *this;
}

Operator& Operator::operator*=(Complex scale) {
  for (auto& e : entries_) e *= scale;
  hermitian_hint_ = hermitian_hint_ && scale.imag() == 0.0;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dim_ != b.dim_) throw ValidationError("operator dimension mismatch in product");
  const std::size_t n = a.dim_;
  Operator out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

// ------------------------------------------------------------- StateVector

StateVector::StateVector(int n_sites, std::vector<Complex> amplitudes)
    : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
  if (n_sites_ < 1 || n_sites_ > 30 || amplitudes_.size() != (std::size_t{1} << n_sites_)) {
    throw ValidationError("state length must be 2^n_sites");
  }
  if (std::abs(norm() - 1.0) > kNormTolerance) {
    throw ValidationError("state is not normalized");
  }
}

StateVector StateVector::basis(int n_sites, std::size_t index) {
  std::vector<Complex> amps(std::size_t{1} << n_sites);
  if (index >= amps.size()) throw IndexError("basis index out of range");
  amps[index] = 1.0;
  return StateVector(n_sites, std::move(amps));
}

StateVector StateVector::product(const StateVector& a, const StateVector& b) {
  std::vector<Complex> amps(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) amps[i * b.dim() + j] = a[i] * b[j];
  return StateVector(a.n_sites() + b.n_sites(), std::move(amps));
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw ValidationError("state dimension mismatch");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) acc += std::conj(amplitudes_[i]) * other[i];
  return acc;
}

// -------------------------------------------------------------- SubsetMask

SubsetMask SubsetMask::of_sites(std::initializer_list<int> sites) {
  std::uint32_t bits = 0;
  for (int k : sites) {
    if (k < 1 || k > 32) throw IndexError("site index out of range");
    bits |= std::uint32_t{1} << (k - 1);
  }
  return SubsetMask(bits);
}

int SubsetMask::cardinality() const { return std::popcount(bits_); }

std::vector<int> SubsetMask::sites() const {
  std::vector<int> out;
  for (int k = 1; k <= 32; ++k)
    if (contains(k)) out.push_back(k);
  return out;
}

// ----------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(int n_kept, Operator entries)
    : n_kept_(n_kept), entries_(std::move(entries)) {
  if (entries_.dim() != (std::size_t{1} << n_kept_)) {
    throw ValidationError("density matrix dimension must be 2^n_kept");
  }
  if (entries_.hermiticity_defect() > kNormTolerance) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(entries_.trace() - 1.0) > kNormTolerance) {
    throw ValidationError("density matrix trace is not 1");
  }
}

double DensityMatrix::purity() const { return overlap(*this); }

double DensityMatrix::overlap(const DensityMatrix& other) const {
  if (other.dim() != dim()) throw ValidationError("density matrix dimension mismatch");
  // tr(AB) = sum_ij A_ij B_ji
  double acc = 0.0;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) acc += (entries_(i, j) * other(j, i)).real();
  return acc;
}

std::vector<double> DensityMatrix::eigenvalues() const {
  return hermitian_eigensystem(entries_).values;
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  Operator rho(psi.dim());
  for (std::size_t i = 0; i < psi.dim(); ++i)
    for (std::size_t j = 0; j < psi.dim(); ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
  return DensityMatrix(psi.n_sites(), std::move(rho));
}

// ---------------------------------------------------------- free functions

Operator kron(const Operator& a, const Operator& b, int max_sites) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  check_capacity(da * db, max_sites);
  Operator out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = aij * b(k, l);
    }
  return Operator(da * db, {out.entries().begin(), out.entries().end()},
                  a.hermitian_hint() && b.hermitian_hint());
}

Operator site_operator(Pauli p, int k, int n, int max_sites) {
  if (n < 1) throw ValidationError("chain size must be positive");
  if (k < 1 || k > n) {
    throw IndexError("site " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  check_capacity(std::size_t{1} << n, max_sites);
  Operator out = Operator::identity(1);
  for (int site = 1; site <= n; ++site) {
    out = kron(out, site == k ? Operator::pauli(p) : Operator::identity(2), max_sites);
  }
  return out;
}

EigenSystem hermitian_eigensystem(const Operator& h) {
  if (h.hermiticity_defect() >= kHermitianTolerance) {
    throw ValidationError("eigensolver input is not Hermitian");
  }
  const std::size_t n = h.dim();
  Operator a = h;
  Operator v = Operator::identity(n);

  double scale = 0.0;
  for (const auto& e : a.entries()) scale = std::max(scale, std::abs(e));
  const double threshold = std::max(scale, 1.0) * 1e-15;

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= threshold) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= threshold) continue;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane makes
        // (G^dagger A G)_pq vanish.
        const Complex phase = apq / g;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex gpp = c;
        const Complex gpq = s;
        const Complex gqp = -s * std::conj(phase);
        const Complex gqq = c * std::conj(phase);

        for (std::size_t i = 0; i < n; ++i) {  // A <- A G
          const Complex aip = a(i, p);
          const Complex aiq = a(i, q);
          a(i, p) = aip * gpp + aiq * gqp;
          a(i, q) = aip * gpq + aiq * gqq;
        }
        for (std::size_t j = 0; j < n; ++j) {  // A <- G^dagger A
          const Complex apj = a(p, j);
          const Complex aqj = a(q, j);
          a(p, j) = std::conj(gpp) * apj + std::conj(gqp) * aqj;
          a(q, j) = std::conj(gpq) * apj + std::conj(gqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t i = 0; i < n; ++i) {  // V <- V G
          const Complex vip = v(i, p);
          const Complex viq = v(i, q);
          v(i, p) = vip * gpp + viq * gqp;
          v(i, q) = vip * gpq + viq * gqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  EigenSystem out{std::vector<double>(n), Operator(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

GroundState hermitian_ground_state(const Operator& h) {
  if (!is_power_of_two(h.dim())) throw ValidationError("Hamiltonian dimension must be 2^N");
  EigenSystem es = hermitian_eigensystem(h);
  const std::size_t n = h.dim();
  std::vector<Complex> amps(n);
  for (std::size_t i = 0; i < n; ++i) amps[i] = es.vectors(i, 0);

  double norm = 0.0;
  for (const auto& x : amps) norm += std::norm(x);
  norm = std::sqrt(norm);
  Complex phase = 1.0;
  for (const auto& x : amps) {
    if (std::abs(x) > 1e-12) {
      phase = std::conj(x) / std::abs(x);
      break;
    }
  }
  for (auto& x : amps) x *= phase / norm;
  for (auto& x : amps) {
    if (std::abs(x) > 1e-12) {
      x = Complex(std::abs(x), 0.0);  // first nonzero amplitude exactly real positive
      break;
    }
  }

  const double gap = n > 1 ? es.values[1] - es.values[0] : 0.0;
  const int n_sites = std::countr_zero(n);
  return GroundState{es.values[0], StateVector(n_sites, std::move(amps)), std::max(gap, 0.0),
                     n > 1 && gap < kDegeneracyGap};
}

DensityMatrix partial_trace(const StateVector& state, SubsetMask keep) {
  const int n = state.n_sites();
  if (keep.empty()) throw ValidationError("partial trace needs a non-empty subset");
  if (n < 32 && (keep.bits() >> n) != 0) throw IndexError("subset contains sites beyond the chain");

  const std::vector<int> kept = keep.sites();
  const int n_kept = static_cast<int>(kept.size());
  std::vector<int> traced;
  for (int k = 1; k <= n; ++k)
    if (!keep.contains(k)) traced.push_back(k);

  // Site k occupies bit (n - k) of a basis index.
  auto scatter = [n](const std::vector<int>& sites, std::size_t local) {
    std::size_t idx = 0;
    const int m = static_cast<int>(sites.size());
    for (int b = 0; b < m; ++b) {
      if ((local >> (m - 1 - b)) & 1u) idx |= std::size_t{1} << (n - sites[b]);
    }
    return idx;
  };

  const std::size_t dk = std::size_t{1} << n_kept;
  const std::size_t de = std::size_t{1} << traced.size();
  std::vector<std::size_t> kept_offsets(dk), env_offsets(de);
  for (std::size_t i = 0; i < dk; ++i) kept_offsets[i] = scatter(kept, i);
  for (std::size_t e = 0; e < de; ++e) env_offsets[e] = scatter(traced, e);

  Operator rho(dk);
  for (std::size_t i = 0; i < dk; ++i) {
    for (std::size_t j = i; j < dk; ++j) {
      Complex acc = 0.0;
      for (std::size_t e = 0; e < de; ++e) {
        acc += state[kept_offsets[i] | env_offsets[e]] *
               std::conj(state[kept_offsets[j] | env_offsets[e]]);
      }
      rho(i, j) = acc;
      rho(j, i) = std::conj(acc);
    }
    rho(i, i) = rho(i, i).real();
  }
  return DensityMatrix(n_kept, std::move(rho));
}

StateVector apply_unitary(const Operator& u, const StateVector& state) {
  if (u.dim() != state.dim()) throw ValidationError("unitary dimension mismatch");
  if (u.unitarity_defect() > kUnitaryTolerance) throw ValidationError("operator is not unitary");
  std::vector<Complex> out(state.dim());
  for (std::size_t i = 0; i < state.dim(); ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < state.dim(); ++j) acc += u(i, j) * state[j];
    out[i] = acc;
  }
  return StateVector(state.n_sites(), std::move(out));
}

double rayleigh_quotient(const Operator& h, std::span<const Complex> v) {
  if (v.size() != h.dim()) throw ValidationError("vector dimension mismatch");
  Complex num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Complex hv = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) hv += h(i, j) * v[j];
    num += std::conj(v[i]) * hv;
    den += std::norm(v[i]);
  }
  return num.real() / den;
}

}  // namespace qquiz
