#include <pdwg/error.hpp>
#include <pdwg/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

namespace pdwg {
namespace {

// Integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!.
double tri_monomial_integral(int a, int b) {
  return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
}

double seg_monomial_integral(int p) { return p % 2 == 0 ? 2.0 / (p + 1) : 0.0; }

TEST(Quadrature, MonomialOracleValues) {
  EXPECT_DOUBLE_EQ(tri_monomial_integral(0, 0), 0.5);
  EXPECT_NEAR(tri_monomial_integral(1, 0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(tri_monomial_integral(1, 1), 1.0 / 24.0, 1e-15);
  EXPECT_NEAR(tri_monomial_integral(2, 0), 1.0 / 12.0, 1e-15);
}

TEST(Quadrature, GaussLegendreTwoPointNodes) {
  const SegmentRule r = gauss_legendre(2);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_NEAR(std::abs(r.points[0]), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r.points[0] + r.points[1], 0.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
  EXPECT_EQ(r.exact_degree, 3);
}

TEST(Quadrature, GaussLegendreRejectsZeroPoints) { EXPECT_THROW(gauss_legendre(0), Error); }

class QuadratureDegree : public ::testing::TestWithParam<int> {};

TEST_P(QuadratureDegree, SegmentRuleIsExactToDeclaredDegree) {
  const SegmentRule r = edge_quadrature(GetParam());
  EXPECT_GE(r.exact_degree, GetParam());
  EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 2.0, 1e-14);
  for (int p = 0; p <= r.exact_degree; ++p) {
    double s = 0.0;
    for (std::size_t q = 0; q < r.points.size(); ++q) s += r.weights[q] * std::pow(r.points[q], p);
    EXPECT_NEAR(s, seg_monomial_integral(p), 1e-13 * std::max(1.0, seg_monomial_integral(p))) << "p=" << p;
  }
}

TEST_P(QuadratureDegree, TriangleRuleIsExactToDeclaredDegree) {
  const TriangleRule r = tri_quadrature(GetParam());
  EXPECT_GE(r.exact_degree, GetParam());
  EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 0.5, 1e-14);
  for (int a = 0; a <= r.exact_degree; ++a) {
    for (int b = 0; a + b <= r.exact_degree; ++b) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.points.size(); ++q) {
        s += r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
      }
      const double exact = tri_monomial_integral(a, b);
      EXPECT_LE(std::abs(s - exact), 1e-13 * exact) << "a=" << a << " b=" << b;
    }
  }
}

TEST_P(QuadratureDegree, TrianglePointsLieInside) {
  for (const Point& p : tri_quadrature(GetParam()).points) {
    EXPECT_GT(p.x(), 0.0);
    EXPECT_GT(p.y(), 0.0);
    EXPECT_LT(p.x() + p.y(), 1.0);
  }
}

INSTANTIATE_TEST_SUITE_P(AllDegrees, QuadratureDegree, ::testing::Range(0, kMaxQuadratureDegree + 1));

TEST(Quadrature, RejectsDegreeOutOfRange) {
  EXPECT_THROW(tri_quadrature(-1), Error);
  EXPECT_THROW(tri_quadrature(kMaxQuadratureDegree + 1), Error);
  EXPECT_THROW(edge_quadrature(kMaxQuadratureDegree + 1), Error);
}

TEST(Quadrature, MappedTriangleIntegratesPhysicalPolynomials) {
  const Point a(0.2, 0.1), b(0.9, 0.3), c(0.4, 0.8);
  const PhysicalRule r = map_to_triangle(tri_quadrature(6), a, b, c);
  const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  double one = 0.0, x = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    one += r.weights[q];
    x += r.weights[q] * r.points[q].x();
  }
  EXPECT_NEAR(one, area, 1e-15);
  EXPECT_NEAR(x, area * (a.x() + b.x() + c.x()) / 3.0, 1e-15);
}

TEST(Quadrature, MappedSegmentIntegratesLength) {
  const Point a(0.0, 0.0), b(3.0, 4.0);
  const PhysicalRule r = map_to_segment(edge_quadrature(4), a, b);
  double len = 0.0, y2 = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    len += r.weights[q];
    y2 += r.weights[q] * r.points[q].y() * r.points[q].y();
  }
  EXPECT_NEAR(len, 5.0, 1e-14);
  // y = 4 s on s in [0, 1], ds = 5: integral 16 s^2 * 5 = 80 / 3.
  EXPECT_NEAR(y2, 80.0 / 3.0, 1e-12);
}

TEST(Quadrature, AffineInvarianceOnRandomTriangles) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const TriangleRule ref = tri_quadrature(8);
  for (int trial = 0; trial < 20; ++trial) {
    Point a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    const double twice = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    if (std::abs(twice) < 1e-2) continue;
    if (twice < 0.0) std::swap(b, c);
    const PhysicalRule r = map_to_triangle(ref, a, b, c);
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q];
    EXPECT_NEAR(s, 0.5 * std::abs(twice), 1e-14);
  }
}

}  // namespace
}  // namespace pdwg
