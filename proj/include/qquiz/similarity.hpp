#pragma once

#include <vector>

#include "qquiz/chain.hpp"
#include "qquiz/hilbert.hpp"

namespace qquiz {

/// Bloch vectors shorter than this have no usable direction.
inline constexpr double kDirectionFloor = 1e-6;

/// Signed per-site angles from candidate to target, counterclockwise about +z positive.
struct AngleProfile {
  std::vector<double> thetas;
  double sum_sin = 0.0;
  double sum_cos = 0.0;

  static AngleProfile from_thetas(std::vector<double> thetas);
};

enum class SubsetFunctionKind { CosineSingleSite, Purity };

/// (tr rho X, tr rho Y, tr rho Z) of a single-site density matrix.
BlochVector bloch_vector(const DensityMatrix& rho);

/// Single-site Bloch vectors of every site of `state`, site 1 first.
std::vector<BlochVector> site_bloch_vectors(const StateVector& state);

/// cos of the angle between the two Bloch vectors, written with traces only:
///   (2 tr(rt rc) - 1) / (sqrt(2 tr rc^2 - 1) sqrt(2 tr rt^2 - 1)).
double cos_theta(const DensityMatrix& rho_t, const DensityMatrix& rho_c,
                 double floor = kDirectionFloor);

/// Same quantity from the Bloch vectors: r.c / (|r| |c|).
double cos_theta(const BlochVector& r, const BlochVector& c, double floor = kDirectionFloor);

/// Angle that rotates c onto r about `axis`, in (-pi, pi]. Components along the axis are
/// projected out first.
double signed_theta(const BlochVector& c, const BlochVector& r,
                    const BlochVector& axis = {0.0, 0.0, 1.0}, double floor = kDirectionFloor);

struct ChainSimilarity {
  double f;  ///< sum_k cos(theta_k)
  AngleProfile profile;
};

ChainSimilarity similarity_chain(const StateVector& state_t, const StateVector& state_c);
ChainSimilarity similarity_chain(const std::vector<BlochVector>& target,
                                 const std::vector<BlochVector>& candidate);

/// Every non-empty proper subset of 1..n in ascending bitmask order (2^n - 2 of them).
std::vector<SubsetMask> enumerate_bipartition_subsets(int n);

/// 1 - (tr rt^2 - tr rc^2)^2.
double purity_term(const DensityMatrix& rho_t, const DensityMatrix& rho_c);

/// Sum over `subsets` of the chosen per-subset comparison of reduced states.
double similarity_general(const StateVector& state_t, const StateVector& state_c,
                          const std::vector<SubsetMask>& subsets, SubsetFunctionKind kind);

}  // namespace qquiz
