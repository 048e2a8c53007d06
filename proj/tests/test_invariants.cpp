#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/invariants.hpp"

using namespace orbitlift;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

void expect_kind(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

// Re((x + i y)^5) = x^5 - 10 x^3 y^2 + 5 x y^4
SparsePolynomial<double> re_z5() {
  return SparsePolynomial<double>(2, {{1.0, {5, 0}}, {-10.0, {3, 2}}, {5.0, {1, 4}}});
}

}  // namespace

TEST(SparsePolynomial, MergesAndValidates) {
  SparsePolynomial<double> p(2, {{1.0, {1, 1}}, {2.0, {1, 1}}, {-1.0, {2, 0}}});
  EXPECT_EQ(p.terms().size(), 2u);
  EXPECT_DOUBLE_EQ(p(vec({2, 3})), 3.0 * 6 - 4);
  expect_kind(ErrorKind::InvalidArgument, [] { SparsePolynomial<double>(2, {{1.0, {1, 0}}, {1.0, {2, 0}}}); });
  expect_kind(ErrorKind::InvalidArgument, [] { SparsePolynomial<double>(1, {{1.0, {1}}, {-1.0, {1}}}); });
  expect_kind(ErrorKind::DimensionMismatch, [] { SparsePolynomial<double>(2, {{1.0, {1}}}); });
}

TEST(SparsePolynomial, ElementaryMatchesExpansion) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 1; n <= 6; ++n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = u(rng);
    const auto e = oracle::elementary_from_roots(std::vector<double>(v.data(), v.data() + n));
    for (int k = 1; k <= n; ++k)
      EXPECT_NEAR(SparsePolynomial<double>::elementary(n, k)(v), e[static_cast<std::size_t>(k - 1)], 1e-12);
  }
}

TEST(Newton, Examples) {
  EXPECT_EQ(newton_e_to_p(vec({0, -1})), vec({0, 2}));
  EXPECT_EQ(newton_p_to_e(vec({0, 0, 0})), Vector::Zero(3));
  const Vector p = newton_e_to_p(vec({10, 35, 50, 24}));
  const std::vector<double> roots{1, 2, 3, 4};
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(p(k - 1), oracle::power_sum(roots, k), 1e-12);
}

TEST(Newton, RoundTripOnRandomRoots) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> r(static_cast<std::size_t>(n));
      for (auto& x : r) x = u(rng);
      const auto ev = oracle::elementary_from_roots(r);
      const Vector e = Eigen::Map<const Vector>(ev.data(), n);
      const Vector p = newton_e_to_p(e);
      for (int k = 1; k <= n; ++k) EXPECT_NEAR(p(k - 1), oracle::power_sum(r, k), 1e-10 * (1 + std::abs(p(k - 1))));
      const Vector back = newton_p_to_e(p);
      for (int k = 0; k < n; ++k) EXPECT_NEAR(back(k), e(k), 1e-10 * (1 + std::abs(e(k))));
    }
  }
}

TEST(OrbitMap, EvaluationExamples) {
  const auto s2 = symmetric_orbit_map(2);
  EXPECT_TRUE(s2(vec({1, -1})).isApprox(vec({2, 0, -1})));
  EXPECT_EQ(s2(Vector::Zero(2)), Vector::Zero(3));
  EXPECT_TRUE(symmetric_orbit_map(3)(vec({1, 1, 0})).isApprox(vec({2, 2, 1, 0})));
  EXPECT_TRUE(symmetric_orbit_map(4)(vec({1, 2, 3, 4})).isApprox(vec({30, 10, 35, 50, 24})));
  EXPECT_TRUE(eval_orbit_map(s2, vec({3, 1})).isApprox(oracle::symmetric_invariants(vec({3, 1}))));
}

TEST(OrbitMap, SymmetricDegrees) {
  const auto s1 = symmetric_orbit_map(1);
  EXPECT_EQ(s1.degrees(), (std::vector<int>{2, 1}));
  EXPECT_EQ(symmetric_orbit_map(2).degrees(), (std::vector<int>{2, 1, 2}));
  EXPECT_EQ(symmetric_orbit_map(4).max_degree(), 4);
}

TEST(OrbitMap, RejectsMissingSquaredNorm) {
  expect_kind(ErrorKind::InvalidArgument, [] {
    OrbitMap(2, {SparsePolynomial<double>(2, {{1.0, {2, 0}}, {2.0, {0, 2}}})});
  });
}

TEST(OrbitMap, GeneratorsGetSquaredNormPrepended) {
  const auto m = orbit_map_from_generators(2, {re_z5()});
  EXPECT_EQ(m.degrees(), (std::vector<int>{2, 5}));
  const auto same = orbit_map_from_generators(2, {SparsePolynomial<double>::squared_norm(2), re_z5()});
  EXPECT_EQ(same.size(), 2u);
}

TEST(OrbitMap, CheckInvarianceExamples) {
  EXPECT_LE(check_invariance(symmetric_orbit_map(4), symmetric_group_rep(4), 1000, 1), 1e-12);
  const OrbitMap q_only(2, {SparsePolynomial<double>::squared_norm(2)});
  EXPECT_LE(check_invariance(q_only, dihedral_group_rep(7), 1000, 1), 1e-12);
  // e_1 flips sign under -I
  Matrix minus = -Matrix::Identity(2, 2);
  const auto sign_flip = enumerate_group({minus}, 4);
  const auto with_e1 = orbit_map_from_generators(2, {SparsePolynomial<double>::elementary(2, 1)});
  EXPECT_GT(check_invariance(with_e1, sign_flip, 200, 1), 1e-2);
}

TEST(OrbitMap, CheckScalingExamples) {
  const auto s2 = symmetric_orbit_map(2);
  EXPECT_TRUE(s2(2.0 * vec({1, -1})).isApprox(vec({8, 0, -4})));
  EXPECT_LE(check_scaling(s2, vec({1, -1}), 2.0), 1e-12);
  EXPECT_EQ(check_scaling(s2, vec({0.3, 0.7}), 1.0), 0.0);
  EXPECT_LE(check_scaling(s2, vec({0.3, 0.7}), 0.0), 1e-15);
}

TEST(Roots, Examples) {
  const auto s2 = symmetric_orbit_map(2);
  EXPECT_TRUE(roots_from_invariants(s2, vec({2, 0, -1})).isApprox(vec({-1, 1})));
  EXPECT_LE(roots_from_invariants(s2, Vector::Zero(3)).norm(), 1e-15);
  EXPECT_LT((roots_from_invariants(symmetric_orbit_map(4), vec({30, 10, 35, 50, 24})) - vec({1, 2, 3, 4})).norm(), 1e-9);
  expect_kind(ErrorKind::NonHyperbolic, [&] { roots_from_invariants(s2, vec({-2, 0, 1})); });
}

TEST(Roots, DoubleRootSplitIsAveraged) {
  // (x - 1)^2 perturbed into a conjugate pair with imaginary part ~ 1e-8
  const auto s2 = symmetric_orbit_map(2);
  const Vector r = roots_from_invariants(s2, vec({2, 2, 1 + 1e-16}));
  EXPECT_NEAR(r(0), 1.0, 1e-7);
  EXPECT_NEAR(r(1), 1.0, 1e-7);
}

TEST(CheckInImage, Examples) {
  const auto s2 = symmetric_orbit_map(2);
  const auto g2 = symmetric_group_rep(2);
  EXPECT_LE(check_in_image(s2, g2, vec({2, 0, -1})), 1e-12);
  expect_kind(ErrorKind::Inconsistent, [&] { check_in_image(s2, g2, vec({1, 5, 5})); });
  const auto d5 = dihedral_group_rep(5);
  const auto m = orbit_map_from_generators(2, {re_z5()});
  const Vector v = vec({0.3, -1.1});
  EXPECT_EQ(check_in_image(m, d5, m(v), v), 0.0);
}

// Properties.

TEST(InvariantProperties, RootRoundTrip) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 1; n <= 6; ++n) {
    const auto map = symmetric_orbit_map(n);
    for (int trial = 0; trial < 100; ++trial) {
      Vector r(n);
      for (int i = 0; i < n; ++i) r(i) = u(rng);
      Vector sorted = r;
      std::sort(sorted.data(), sorted.data() + n);
      const Vector got = roots_from_invariants(map, map(r));
      EXPECT_LE((got - sorted).cwiseAbs().maxCoeff(), 1e-7 * (1 + r.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(InvariantProperties, SymmetricInvariance) {
  for (int n = 1; n <= 6; ++n)
    EXPECT_LE(check_invariance(symmetric_orbit_map(n), symmetric_group_rep(n), 1000, 100 + n), 1e-11) << n;
}

TEST(InvariantProperties, DihedralFiveInvariance) {
  EXPECT_LE(check_invariance(orbit_map_from_generators(2, {re_z5()}), dihedral_group_rep(5), 1000, 3), 1e-11);
}

TEST(InvariantProperties, Scaling) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 1; n <= 6; ++n) {
    const auto map = symmetric_orbit_map(n);
    const int d = map.max_degree();
    for (int trial = 0; trial < 100; ++trial) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = u(rng);
      const double t = u(rng);
      EXPECT_LE(check_scaling(map, v, t), 1e-10 * (1 + std::pow(std::abs(t), d)) * (1 + std::pow(v.norm(), d)));
    }
  }
}
