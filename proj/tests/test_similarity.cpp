#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "qquiz/chain.hpp"
#include "qquiz/errors.hpp"
#include "qquiz/similarity.hpp"

using namespace qquiz;

namespace {

DensityMatrix from_bloch(const BlochVector& v) {
  Operator rho(2);
  rho(0, 0) = 0.5 * (1.0 + v.z);
  rho(1, 1) = 0.5 * (1.0 - v.z);
  rho(0, 1) = Complex(0.5 * v.x, -0.5 * v.y);
  rho(1, 0) = Complex(0.5 * v.x, 0.5 * v.y);
  return DensityMatrix(1, rho);
}

BlochVector random_bloch(std::mt19937_64& rng, double min_norm, double max_norm = 1.0) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(min_norm, max_norm);
  BlochVector v{g(rng), g(rng), g(rng)};
  return v.scaled(u(rng) / v.norm());
}

StateVector uniform_product(double b, int n) {
  StateVector s = product_ground_site(b);
  for (int k = 1; k < n; ++k) s = StateVector::product(s, product_ground_site(b));
  return s;
}

}  // namespace

TEST_CASE("Bloch vectors read off density matrices") {
  const BlochVector mixed = bloch_vector(from_bloch({0, 0, 0}));
  CHECK(mixed.norm() == 0.0);

  const BlochVector up = bloch_vector(partial_trace(StateVector::basis(1, 0), SubsetMask::site(1)));
  CHECK(up.x == 0.0);
  CHECK(up.y == 0.0);
  CHECK(up.z == 1.0);

  const BlochVector v = bloch_vector(from_bloch({0.6, -0.8, 0.0}));
  CHECK(v.x == doctest::Approx(0.6));
  CHECK(v.y == doctest::Approx(-0.8));
  CHECK(v.z == 0.0);

  CHECK_THROWS_AS(bloch_vector(partial_trace(StateVector::basis(2, 0), SubsetMask::of_sites({1, 2}))),
                  ValidationError);
}

TEST_CASE("Bloch reconstruction round-trips") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const StateVector psi = qquiz::testing::random_state(3, rng);
    const DensityMatrix rho = partial_trace(psi, SubsetMask::site(1 + t % 3));
    const DensityMatrix rebuilt = from_bloch(bloch_vector(rho));
    CHECK(qquiz::testing::max_abs_diff(rho.op(), rebuilt.op()) < 1e-10);
  }
}

TEST_CASE("cos_theta examples") {
  const DensityMatrix pure = from_bloch({0.0, 1.0, 0.0});
  CHECK(cos_theta(pure, pure) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cos_theta(from_bloch({0.3, 0.4, 0.0}), from_bloch({-0.6, -0.8, 0.0})) ==
        doctest::Approx(-1.0).epsilon(1e-12));

  const BlochVector r{-0.9, 0.0, 0.0};
  const BlochVector c{0.0, -0.5, 0.0};
  CHECK(std::abs(cos_theta(from_bloch(r), from_bloch(c))) < 1e-15);
  CHECK(std::abs(cos_theta(r, c)) < 1e-15);

  CHECK_THROWS_AS(cos_theta(from_bloch({0, 0, 0}), pure), UndefinedDirectionError);
  CHECK_THROWS_AS(cos_theta(pure, from_bloch({1e-7, 0, 0})), UndefinedDirectionError);
}

TEST_CASE("trace and Bloch-vector forms of cos theta agree") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 1000; ++t) {
    const BlochVector r = random_bloch(rng, 0.1);
    const BlochVector c = random_bloch(rng, 0.1);
    CHECK(std::abs(cos_theta(from_bloch(r), from_bloch(c)) - cos_theta(r, c)) < 1e-9);
  }
}

TEST_CASE("single-site rotations leave the cos theta denominator unchanged") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const BlochVector c = random_bloch(rng, 0.0);
    const DensityMatrix rho = from_bloch(c);
    const Operator u =
        qquiz::testing::taylor_expm(qquiz::testing::random_hermitian(2, rng), 1.3);
    const Operator rotated = u * (rho.op() * u.adjoint());
    Operator herm(2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) herm(i, j) = 0.5 * (rotated(i, j) + std::conj(rotated(j, i)));
    const DensityMatrix after(1, herm);
    CHECK(std::abs((2 * after.purity() - 1) - (2 * rho.purity() - 1)) < 1e-12);
  }
}

TEST_CASE("signed theta") {
  const BlochVector z{0, 0, 1};
  const BlochVector c = product_ground_bloch(-0.5);
  const BlochVector r = product_ground_bloch(0.5);
  CHECK(signed_theta(c, c, z) == 0.0);
  CHECK(signed_theta(c, r, z) == doctest::Approx(2.0 * std::atan(0.5)).epsilon(1e-14));
  CHECK(signed_theta(c, r, z) == doctest::Approx(std::atan2(0.8, 0.6)).epsilon(1e-14));
  CHECK(signed_theta(r, c, z) == doctest::Approx(-2.0 * std::atan(0.5)).epsilon(1e-14));

  // antipodal vectors land on +pi, never -pi
  CHECK(signed_theta({1, 0, 0}, {-1, 0, 0}, z) == std::numbers::pi);
  CHECK_THROWS_AS(signed_theta({0, 0, 0.9}, {1, 0, 0}, z), UndefinedDirectionError);

  std::mt19937_64 rng(23);
  for (int t = 0; t < 500; ++t) {
    BlochVector a = random_bloch(rng, 0.1);
    BlochVector b = random_bloch(rng, 0.1);
    a.z = 0.0;
    b.z = 0.0;
    if (a.norm() < 0.01 || b.norm() < 0.01) continue;
    const double theta = signed_theta(a, b, z);
    CHECK(std::abs(std::cos(theta) - cos_theta(from_bloch(a), from_bloch(b))) < 1e-9);
    CHECK(signed_theta(b, a, z) == doctest::Approx(-theta).epsilon(1e-12));
  }
}

TEST_CASE("chain similarity") {
  std::mt19937_64 rng(4);
  const StateVector psi = ground_state({4, 1.0, {0.5, -0.25, 0.0, 0.25}}).state;
  const ChainSimilarity self = similarity_chain(psi, psi);
  CHECK(self.f == doctest::Approx(4.0).epsilon(1e-14));
  for (double t : self.profile.thetas) CHECK(std::abs(t) < 1e-8);

  // J = 0: every site sits at angle 2 arctan(0.5), cos = 0.6.
  const ChainSimilarity sim = similarity_chain(uniform_product(0.5, 4), uniform_product(-0.5, 4));
  CHECK(sim.f == doctest::Approx(2.4).epsilon(1e-12));
  for (double t : sim.profile.thetas) CHECK(t == doctest::Approx(0.927295218).epsilon(1e-9));
  CHECK(sim.profile.sum_cos == doctest::Approx(sim.f).epsilon(1e-10));

  const StateVector same_spec = ground_state(ChainSpec::uniform(4, 1.0, -0.5)).state;
  CHECK(similarity_chain(same_spec, same_spec).f == doctest::Approx(4.0).epsilon(1e-14));

  // Random states: F stays in [-N, N].
  for (int t = 0; t < 100; ++t) {
    const StateVector a = qquiz::testing::random_state(3, rng);
    const StateVector b = qquiz::testing::random_state(3, rng);
    const auto va = site_bloch_vectors(a);
    const auto vb = site_bloch_vectors(b);
    const double f = similarity_chain(va, vb).f;
    CHECK(f >= -3.0);
    CHECK(f <= 3.0);
  }
  CHECK_THROWS_AS(similarity_chain(psi, qquiz::testing::random_state(3, rng)), ValidationError);
}

TEST_CASE("F equals N exactly when every angle vanishes") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    std::vector<BlochVector> target, candidate;
    bool aligned = t % 2 == 0;
    for (int k = 0; k < 4; ++k) {
      BlochVector v = random_bloch(rng, 0.2);
      v.z = 0.0;
      target.push_back(v);
      candidate.push_back(aligned ? v.scaled(0.5) : random_bloch(rng, 0.2));
    }
    const ChainSimilarity s = similarity_chain(target, candidate);
    bool all_zero = true;
    for (double th : s.profile.thetas) all_zero = all_zero && std::abs(th) < 1e-8;
    CHECK((std::abs(s.f - 4.0) < 1e-8) == all_zero);
  }
}

TEST_CASE("bipartition subsets") {
  const auto two = enumerate_bipartition_subsets(2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == SubsetMask::of_sites({1}));
  CHECK(two[1] == SubsetMask::of_sites({2}));
  CHECK(enumerate_bipartition_subsets(4).size() == 14);
  CHECK(enumerate_bipartition_subsets(6).size() == 62);
  const auto six = enumerate_bipartition_subsets(6);
  for (std::size_t i = 1; i < six.size(); ++i) CHECK(six[i - 1].bits() < six[i].bits());
  CHECK_THROWS_AS(enumerate_bipartition_subsets(1), ValidationError);
}

TEST_CASE("purity term") {
  const DensityMatrix pure = from_bloch({1, 0, 0});
  const DensityMatrix mixed = from_bloch({0, 0, 0});
  CHECK(purity_term(pure, pure) == doctest::Approx(1.0));
  CHECK(purity_term(pure, mixed) == doctest::Approx(0.75));
  CHECK_THROWS_AS(purity_term(pure, partial_trace(StateVector::basis(2, 0), SubsetMask::of_sites({1, 2}))),
                  ValidationError);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto a = partial_trace(qquiz::testing::random_state(3, rng), SubsetMask(3));
    const auto b = partial_trace(qquiz::testing::random_state(3, rng), SubsetMask(3));
    const double v = purity_term(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("general similarity") {
  const StateVector t = ground_state({4, 1.0, {0.5, -0.25, 0.0, 0.25}}).state;
  const StateVector c = ground_state(ChainSpec::uniform(4, 1.0, -0.5)).state;
  std::vector<SubsetMask> singles;
  for (int k = 1; k <= 4; ++k) singles.push_back(SubsetMask::site(k));
  CHECK(similarity_general(t, c, singles, SubsetFunctionKind::CosineSingleSite) ==
        doctest::Approx(similarity_chain(t, c).f).epsilon(1e-14));

  const auto all = enumerate_bipartition_subsets(4);
  CHECK(std::abs(similarity_general(c, c, all, SubsetFunctionKind::Purity) - 14.0) < 1e-10);
  CHECK_THROWS_AS(similarity_general(t, c, all, SubsetFunctionKind::CosineSingleSite), ValidationError);
  CHECK_THROWS_AS(similarity_general(t, c, {SubsetMask::site(5)}, SubsetFunctionKind::Purity), ValidationError);

  // A global z rotation acts locally on every subset, so subset purities do not move.
  Operator sum_z(16, true);
  for (int k = 1; k <= 4; ++k) sum_z += site_operator(Pauli::Z, k, 4);
  const double before = similarity_general(t, c, all, SubsetFunctionKind::Purity);
  for (double chi : {0.1, 0.7, -1.9, 3.0}) {
    const StateVector rotated = apply_unitary(qquiz::testing::taylor_expm(sum_z, chi), c);
    CHECK(std::abs(similarity_general(t, rotated, all, SubsetFunctionKind::Purity) - before) < 1e-10);
  }
}
