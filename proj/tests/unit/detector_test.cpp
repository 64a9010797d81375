#include <gtest/gtest.h>

#include <cmath>

#include "costas/detector.hpp"
#include "costas/math.hpp"

namespace costas {
namespace {

TEST(LimiterSign, ZeroMapsToPlusOne) {
  EXPECT_EQ(limiter_sign(0.0), 1.0);
  EXPECT_EQ(limiter_sign(-0.0), 1.0);
  EXPECT_EQ(limiter_sign(-1e-300), -1.0);
  EXPECT_EQ(limiter_sign(2.0), 1.0);
}

TEST(PdQuadrature, KnownValues) {
  EXPECT_NEAR(pd_quadrature(3.0, 4.2566), 1.2566, 1e-15);
  EXPECT_EQ(pd_quadrature(0.0, 0.0), 0.0);
  EXPECT_EQ(pd_quadrature(1.0, 1.0), 0.0);
  // i sign q - q sign i with opposite signs
  EXPECT_DOUBLE_EQ(pd_quadrature(1.0, -2.0), -2.0 + 1.0);
  const PdSample s = pd_sample(3.0, 4.2566);
  EXPECT_EQ(s.q, 3.0);
  EXPECT_EQ(s.i, 4.2566);
  EXPECT_EQ(s.phi, pd_quadrature(3.0, 4.2566));
}

TEST(BasebandQi, MatchesHighPrecisionValues) {
  const QiPair qi = baseband_qi(0.1, 1.0, 1.0);
  EXPECT_NEAR(qi.q, 0.547418790962427, 1e-15);
  EXPECT_NEAR(qi.i, 0.447585374315599, 1e-15);
  EXPECT_NEAR(pd_quadrature(qi.q, qi.i), -0.0998334166468282, 1e-15);
}

TEST(PdPiecewise, BranchFormulas) {
  EXPECT_DOUBLE_EQ(pd_piecewise(0.1), -std::sin(0.1));
  EXPECT_DOUBLE_EQ(pd_piecewise(kHalfPi + 0.1), std::cos(kHalfPi + 0.1));
  EXPECT_DOUBLE_EQ(pd_piecewise(kPi + 0.1), std::sin(kPi + 0.1));
  EXPECT_DOUBLE_EQ(pd_piecewise(1.5 * kPi + 0.1), -std::cos(1.5 * kPi + 0.1));
  EXPECT_EQ(pd_piecewise(0.0), 0.0);
}

TEST(PdPiecewise, BoundaryUsesRightLimit) {
  // at pi/4 the right branch is cos, left is -sin
  EXPECT_DOUBLE_EQ(pd_piecewise(kQuarterPi), std::cos(kQuarterPi));
  EXPECT_EQ(pd_branch(kQuarterPi), 1);
  EXPECT_EQ(pd_branch(-kQuarterPi), 0);
  EXPECT_EQ(pd_branch(kQuarterPi - 1e-12), 0);
}

TEST(PdPiecewise, SinFormAgreesOffBoundaries) {
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double th = -10.0 + 20.0 * k / n;
    if (distance_to_pd_boundary(th) < 1e-9) continue;
    ASSERT_NEAR(pd_sin_form(th), pd_piecewise(th), 1e-12) << th;
  }
}

TEST(PdPiecewise, QuarterPeriodicAndBounded) {
  for (int k = 0; k < 20000; ++k) {
    const double th = -7.0 + 14.0 * k / 20000.0;
    if (distance_to_pd_boundary(th) < 1e-9) continue;
    ASSERT_NEAR(pd_piecewise(th + kHalfPi), pd_piecewise(th), 1e-12);
    ASSERT_LE(std::abs(pd_piecewise(th)), kInvSqrt2 + 1e-15);
  }
  EXPECT_NEAR(std::abs(pd_piecewise(kQuarterPi - 1e-12)), kInvSqrt2, 1e-11);
}

TEST(PdPiecewise, SlopeMatchesFiniteDifference) {
  for (double th : {0.1, 0.5, 1.2, 2.0, 3.0, 4.0, 5.0, -0.3}) {
    const double h = 1e-6;
    const double fd = (pd_piecewise(th + h) - pd_piecewise(th - h)) / (2 * h);
    EXPECT_NEAR(pd_piecewise_slope(th), fd, 1e-8) << th;
  }
}

TEST(PdQuadrature, DataSymbolsActAsQuarterTurns) {
  // (m1, m2) -> sign s and shift k with qi(th; m1, m2) = s qi(th + k pi/2; 1, 1)
  struct Case {
    double m1, m2, s;
    int k;
  };
  for (const Case c : {Case{1, 1, 1, 0}, Case{1, -1, -1, -1}, Case{-1, -1, -1, 0},
                       Case{-1, 1, 1, -1}}) {
    for (int j = 0; j < 2000; ++j) {
      const double th = -4.0 + 8.0 * j / 2000.0;
      if (distance_to_pd_boundary(th) < 1e-9) continue;
      const QiPair a = baseband_qi(th, c.m1, c.m2);
      const QiPair b = baseband_qi(th + c.k * kHalfPi, 1.0, 1.0);
      ASSERT_NEAR(a.q, c.s * b.q, 1e-14);
      ASSERT_NEAR(a.i, c.s * b.i, 1e-14);
      ASSERT_NEAR(pd_quadrature(a.q, a.i), pd_piecewise(th), 1e-14);
    }
  }
}

TEST(PdBoundary, Distance) {
  EXPECT_NEAR(distance_to_pd_boundary(0.0), kQuarterPi, 1e-15);
  EXPECT_NEAR(distance_to_pd_boundary(kQuarterPi + 0.01), 0.01, 1e-15);
  EXPECT_NEAR(distance_to_pd_boundary(-kQuarterPi - 0.02), 0.02, 1e-15);
}

}  // namespace
}  // namespace costas
