#include "qquiz/similarity.hpp"

#include <cmath>
#include <numbers>

#include "qquiz/errors.hpp"

namespace qquiz {
namespace {

void require_single_site(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw ValidationError("expected a single-site (2x2) density matrix");
}

double clamp_unit(double x) { return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x); }

}  // namespace

AngleProfile AngleProfile::from_thetas(std::vector<double> thetas) {
  AngleProfile p{std::move(thetas)};
  for (double t : p.thetas) {
    p.sum_sin += std::sin(t);
    p.sum_cos += std::cos(t);
  }
  return p;
}

BlochVector bloch_vector(const DensityMatrix& rho) {
  require_single_site(rho);
  // rho = (I + v.sigma)/2 => rho_01 = (x - i y)/2
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

std::vector<BlochVector> site_bloch_vectors(const StateVector& state) {
  std::vector<BlochVector> out;
  out.reserve(static_cast<std::size_t>(state.n_sites()));
  for (int k = 1; k <= state.n_sites(); ++k) {
    out.push_back(bloch_vector(partial_trace(state, SubsetMask::site(k))));
  }
  return out;
}

double cos_theta(const DensityMatrix& rho_t, const DensityMatrix& rho_c, double floor) {
  require_single_site(rho_t);
  require_single_site(rho_c);
  // |v|^2 = 2 tr(rho^2) - 1
  const double len2_t = 2.0 * rho_t.purity() - 1.0;
  const double len2_c = 2.0 * rho_c.purity() - 1.0;
  if (len2_t < floor * floor || len2_c < floor * floor) {
    throw UndefinedDirectionError("Bloch vector below the direction floor");
  }
  return clamp_unit((2.0 * rho_t.overlap(rho_c) - 1.0) / (std::sqrt(len2_c) * std::sqrt(len2_t)));
}

double cos_theta(const BlochVector& r, const BlochVector& c, double floor) {
  const double nr = r.norm();
  const double nc = c.norm();
  if (nr < floor || nc < floor) throw UndefinedDirectionError("Bloch vector below the direction floor");
  return clamp_unit(r.dot(c) / (nr * nc));
}

double signed_theta(const BlochVector& c, const BlochVector& r, const BlochVector& axis,
                    double floor) {
  const BlochVector c_perp = c - axis.scaled(c.dot(axis));
  const BlochVector r_perp = r - axis.scaled(r.dot(axis));
  if (c_perp.norm() < floor || r_perp.norm() < floor) {
    throw UndefinedDirectionError("projected Bloch vector below the direction floor");
  }
  const double theta = std::atan2(axis.dot(c.cross(r)), c_perp.dot(r_perp));
  return theta == -std::numbers::pi ? std::numbers::pi : theta;
}

ChainSimilarity similarity_chain(const std::vector<BlochVector>& target,
                                 const std::vector<BlochVector>& candidate) {
  if (target.size() != candidate.size()) throw ValidationError("chains differ in size");
  std::vector<double> thetas;
  thetas.reserve(target.size());
  double f = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    f += cos_theta(target[k], candidate[k]);
    thetas.push_back(signed_theta(candidate[k], target[k]));
  }
  return {f, AngleProfile::from_thetas(std::move(thetas))};
}

ChainSimilarity similarity_chain(const StateVector& state_t, const StateVector& state_c) {
  if (state_t.n_sites() != state_c.n_sites()) throw ValidationError("chains differ in size");
  const int n = state_t.n_sites();
  std::vector<double> thetas;
  thetas.reserve(static_cast<std::size_t>(n));
  double f = 0.0;
  for (int k = 1; k <= n; ++k) {
    const DensityMatrix rho_t = partial_trace(state_t, SubsetMask::site(k));
    const DensityMatrix rho_c = partial_trace(state_c, SubsetMask::site(k));
    f += cos_theta(rho_t, rho_c);
    thetas.push_back(signed_theta(bloch_vector(rho_c), bloch_vector(rho_t)));
  }
  return {f, AngleProfile::from_thetas(std::move(thetas))};
}

std::vector<SubsetMask> enumerate_bipartition_subsets(int n) {
  if (n < 2) throw ValidationError("bipartitions need at least two sites");
  if (n > 31) throw CapacityError("too many sites for subset enumeration");
  std::vector<SubsetMask> out;
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  out.reserve(full - 1);
  for (std::uint32_t bits = 1; bits < full; ++bits) out.emplace_back(bits);
  return out;
}

double purity_term(const DensityMatrix& rho_t, const DensityMatrix& rho_c) {
  if (rho_t.dim() != rho_c.dim()) throw ValidationError("density matrix dimension mismatch");
  const double d = rho_t.purity() - rho_c.purity();
  return 1.0 - d * d;
}

double similarity_general(const StateVector& state_t, const StateVector& state_c,
                          const std::vector<SubsetMask>& subsets, SubsetFunctionKind kind) {
  if (state_t.n_sites() != state_c.n_sites()) throw ValidationError("chains differ in size");
  const int n = state_t.n_sites();
  for (const SubsetMask s : subsets) {
    if (s.empty() || (n < 32 && (s.bits() >> n) != 0)) {
      throw ValidationError("subset outside the chain");
    }
    if (kind == SubsetFunctionKind::CosineSingleSite && s.cardinality() != 1) {
      throw ValidationError("cosine similarity applies to single sites only");
    }
  }
  double total = 0.0;
  for (const SubsetMask s : subsets) {
    const DensityMatrix rho_t = partial_trace(state_t, s);
    const DensityMatrix rho_c = partial_trace(state_c, s);
    total += kind == SubsetFunctionKind::Purity ? purity_term(rho_t, rho_c) : cos_theta(rho_t, rho_c);
  }
  return total;
}

}  // namespace qquiz
