#pragma once

// Test-only reference routines. They take the slow, obvious route on purpose and share no
// code with the library paths they check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qquiz/hilbert.hpp"

namespace qquiz::testing {

inline StateVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> amps(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : amps) {
    a = Complex(g(rng), g(rng));
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return StateVector(n, std::move(amps));
}

inline Operator random_hermitian(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Operator h(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    h(i, i) = g(rng);
    for (std::size_t j = i + 1; j < dim; ++j) {
      h(i, j) = Complex(g(rng), g(rng));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

/// Reduced density matrix from the full |psi><psi| by explicit index bookkeeping:
/// rho[a][b] = sum over basis pairs (x, y) that agree on traced sites.
inline std::vector<std::vector<Complex>> naive_partial_trace(const StateVector& psi,
                                                             const std::vector<int>& keep) {
  const int n = psi.n_sites();
  const std::size_t dim = psi.dim();
  auto bit_of_site = [n](std::size_t idx, int site) { return (idx >> (n - site)) & 1u; };
  auto local_index = [&](std::size_t idx) {
    std::size_t out = 0;
    for (int s : keep) out = (out << 1) | bit_of_site(idx, s);
    return out;
  };
  auto same_env = [&](std::size_t x, std::size_t y) {
    for (int s = 1; s <= n; ++s) {
      bool kept = false;
      for (int k : keep) kept = kept || k == s;
      if (!kept && bit_of_site(x, s) != bit_of_site(y, s)) return false;
    }
    return true;
  };
  const std::size_t dk = std::size_t{1} << keep.size();
  std::vector<std::vector<Complex>> rho(dk, std::vector<Complex>(dk));
  for (std::size_t x = 0; x < dim; ++x)
    for (std::size_t y = 0; y < dim; ++y)
      if (same_env(x, y)) rho[local_index(x)][local_index(y)] += psi[x] * std::conj(psi[y]);
  return rho;
}

/// exp(-i t A) by a truncated Taylor series with scaling and squaring.
inline Operator taylor_expm(const Operator& a, double t) {
  const std::size_t n = a.dim();
  int squarings = 0;
  double scale = std::abs(t);
  for (const auto& e : a.entries()) scale = std::max(scale, std::abs(t) * std::abs(e) * n);
  while (scale > 0.5) {
    scale /= 2.0;
    ++squarings;
  }
  const Complex step(0.0, -t / std::ldexp(1.0, squarings));
  Operator term = Operator::identity(n);
  Operator sum = Operator::identity(n);
  for (int k = 1; k < 30; ++k) {
    term = (step / static_cast<double>(k)) * (term * a);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline double max_abs_diff(const Operator& a, const Operator& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

/// Argmax of f on a uniform grid over (lo, hi].
template <class F>
std::pair<double, double> grid_maximum(F&& f, double lo, double hi, double step) {
  double best_x = hi, best_v = f(hi);
  const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step));
  for (std::int64_t i = 1; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return {best_x, best_v};
}

}  // namespace qquiz::testing
