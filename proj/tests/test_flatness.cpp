#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/flatness.hpp"
#include "orbitlift/invariants.hpp"

using namespace orbitlift;

namespace {

SampledCurve scalar_curve(const Vector& grid, const std::function<double(double)>& f) {
  SampledCurve c;
  c.grid = grid;
  c.values.resize(grid.size(), 1);
  for (Eigen::Index k = 0; k < grid.size(); ++k) c.values(k, 0) = f(grid(k));
  c.degrees = {2};
  return c;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

const Vector kGrid = oracle::linspace(-1, 1, 201);  // h = 1e-2, t = 0 at index 100

}  // namespace

TEST(Flatness, ExactMonomial) {
  EXPECT_EQ(estimate_flatness(scalar_curve(kGrid, [](double t) { return t * t; }), 0, 100, 6), 2);
}

TEST(Flatness, NotFlat) {
  EXPECT_EQ(estimate_flatness(scalar_curve(kGrid, [](double t) { return 1 + t; }), 0, 100, 6), -1);
}

TEST(Flatness, DominantTerm) {
  EXPECT_EQ(estimate_flatness(scalar_curve(kGrid, [](double t) { return t * t * t + 10 * std::pow(t, 5); }), 0, 100, 6), 3);
}

TEST(Flatness, IdenticallyZeroIsCapped) {
  EXPECT_EQ(estimate_flatness(scalar_curve(kGrid, [](double) { return 0.0; }), 0, 100, 4), 4);
}

TEST(Flatness, WindowTooSmallAtEdge) {
  const auto c = scalar_curve(oracle::linspace(0, 1, 5), [](double t) { return t * t; });
  try {
    estimate_flatness(c, 0, 0, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WindowTooSmall);
  }
}

TEST(MultiplicityLemma, TwinRoots) {
  const auto c = oracle::symmetric_curve(kGrid, [](double t) { return vec2(t, -t); });
  const auto r = check_multiplicity_lemma(c, 100);
  EXPECT_TRUE(r.lemma_holds);
  EXPECT_EQ(r.orders, (std::vector<int>{2, 4, 2}));
}

TEST(MultiplicityLemma, UnequalRootOrders) {
  const auto c = oracle::symmetric_curve(kGrid, [](double t) { return vec2(t, t * t); });
  const auto r = check_multiplicity_lemma(c, 100);
  EXPECT_TRUE(r.lemma_holds);
  EXPECT_EQ(r.orders[0], 2);
  EXPECT_GE(r.orders[1], 1);
  EXPECT_GE(r.orders[2], 2);
}

TEST(MultiplicityLemma, ZeroCurve) {
  const auto c = oracle::symmetric_curve(kGrid, [](double) { return Vector::Zero(3).eval(); });
  const auto r = check_multiplicity_lemma(c, 57);
  EXPECT_TRUE(r.lemma_holds);
  EXPECT_EQ(r.orders, (std::vector<int>(4, 5)));
}

TEST(MultiplicityLemma, RequiresZero) {
  const auto c = oracle::symmetric_curve(kGrid, [](double t) { return vec2(1 + t, -t); });
  EXPECT_THROW(check_multiplicity_lemma(c, 100), Error);
}

TEST(RescaledCurve, TwinRootsBecomeConstant) {
  const auto c = oracle::symmetric_curve(kGrid, [](double t) { return vec2(t, -t); });
  const auto r = rescaled_curve(c, 0.0);
  Vector want(3);
  want << 2, 0, -1;
  for (Eigen::Index k = 0; k < r.samples(); ++k) EXPECT_LE((r.values.row(k).transpose() - want).norm(), 1e-12) << k;
}

TEST(RescaledCurve, ZeroStaysZero) {
  const auto c = oracle::symmetric_curve(kGrid, [](double) { return Vector::Zero(2).eval(); });
  EXPECT_EQ(rescaled_curve(c, 0.0).values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(RescaledCurve, LeadingTermLimit) {
  const auto c = oracle::symmetric_curve(kGrid, [](double t) { return vec2(t + t * t, -t); });
  const auto r = rescaled_curve(c, 0.0);
  // c1 = 2t^2 + 2t^3 + t^4, e1 = t^2, e2 = -t^2 - t^3, so the rescaling is (2 + 2t + t^2, t, -1 - t)
  Vector at0(3);
  at0 << 2, 0, -1;
  EXPECT_LE((r.values.row(100).transpose() - at0).norm(), 1e-3);
  for (Eigen::Index k : {0, 50, 150, 200}) {
    const double t = kGrid(k);
    Vector want(3);
    want << 2 + 2 * t + t * t, t, -1 - t;
    EXPECT_LE((r.values.row(k).transpose() - want).norm(), 1e-12) << k;
  }
}

TEST(RescaledCurve, RejectsNonZeroInstant) {
  const auto c = oracle::symmetric_curve(kGrid, [](double t) { return vec2(1 + t, -t); });
  try {
    rescaled_curve(c, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LemmaViolated);
  }
}

// Properties.

TEST(FlatnessProperties, LemmaHoldsOnSynthesizedZeros) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    std::vector<double> a(static_cast<std::size_t>(n)), b(a.size());
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = u(rng);
      b[static_cast<std::size_t>(i)] = u(rng);
    }
    const auto c = oracle::symmetric_curve(kGrid, [&](double t) {
      Vector w(n);
      for (int i = 0; i < n; ++i) w(i) = t * (a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)] * std::sin(t));
      return w;
    });
    const auto r = check_multiplicity_lemma(c, 100);
    EXPECT_TRUE(r.lemma_holds) << trial << " orders " << ::testing::PrintToString(r.orders) << " slopes " << ::testing::PrintToString(r.slopes);
  }
}

TEST(FlatnessProperties, RescaleThenMultiplyReproduces) {
  const auto c = oracle::symmetric_curve(kGrid, [](double t) {
    Vector w(3);
    w << t * (1 + 0.5 * t), -2 * t, t * std::cos(t);
    return w;
  });
  const auto r = rescaled_curve(c, 0.0);
  for (Eigen::Index k = 0; k < c.samples(); ++k) {
    if (std::abs(kGrid(k)) <= 3 * 1e-2 + 1e-12) continue;
    for (Eigen::Index i = 0; i < c.coords(); ++i) {
      const double back = r.values(k, i) * std::pow(kGrid(k), c.degrees[static_cast<std::size_t>(i)]);
      EXPECT_LE(std::abs(back - c.values(k, i)), 1e-12 * (1 + std::abs(c.values(k, i))));
    }
  }
}

TEST(FlatnessProperties, InvariantUnderPositiveRescaling) {
  const std::vector<std::function<double(double)>> fs{
      [](double t) { return t * t; }, [](double t) { return t * t * t + 10 * std::pow(t, 5); },
      [](double t) { return std::pow(t, 4) * (1 + t); }, [](double t) { return 1 + t; }};
  for (const auto& f : fs) {
    const int base = estimate_flatness(scalar_curve(kGrid, f), 0, 100, 6);
    for (double alpha : {1e-3, 1.0, 1e3})
      EXPECT_EQ(estimate_flatness(scalar_curve(kGrid, [&](double t) { return alpha * f(t); }), 0, 100, 6), base);
  }
}

TEST(FlatnessConfidence, BelowFloorIsFlagged) {
  // t^9 stays under the relative floor across the window while the first coordinate sets a large scale
  SampledCurve c;
  c.grid = kGrid;
  c.values.resize(kGrid.size(), 2);
  for (Eigen::Index k = 0; k < kGrid.size(); ++k) c.values.row(k) << 1e4 * (1 + kGrid(k)), std::pow(kGrid(k), 9);
  c.degrees = {2, 2};
  const auto e = estimate_flatness_detail(c, 1, 100, 4);
  EXPECT_EQ(e.order, 4);
  EXPECT_LT(e.confidence, 0.5);
  const auto exact = estimate_flatness_detail(scalar_curve(kGrid, [](double) { return 0.0; }), 0, 100, 4);
  EXPECT_EQ(exact.confidence, 1.0);
}

TEST(FlatnessConfidence, IntegerSlopeIsConfident) {
  const auto e = estimate_flatness_detail(scalar_curve(kGrid, [](double t) { return t * t * t; }), 0, 100, 6);
  EXPECT_EQ(e.order, 3);
  EXPECT_NEAR(e.slope, 3.0, 1e-9);
  EXPECT_GT(e.confidence, 0.99);
}
