#include "pdwg/quadrature.hpp"

#include "pdwg/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace pdwg {

namespace {

void check_degree(int exact_degree) {
  PDWG_REQUIRE(exact_degree >= 0 && exact_degree <= kMaxQuadratureDegree, Error,
               "quadrature degree out of range [0, " + std::to_string(kMaxQuadratureDegree) +
                   "]: " + std::to_string(exact_degree));
}

}  // namespace

SegmentRule gauss_legendre(int n) {
  PDWG_REQUIRE(n >= 1, Error, "Gauss-Legendre rule needs at least one point");
  SegmentRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exact_degree = 2 * n - 1;
  // Newton iteration on P_n from the Chebyshev-like initial guess; roots are
  // symmetric so only half are computed.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

SegmentRule edge_quadrature(int exact_degree) {
  check_degree(exact_degree);
  SegmentRule rule = gauss_legendre(exact_degree / 2 + 1);
  rule.exact_degree = exact_degree;
  return rule;
}

TriangleRule tri_quadrature(int exact_degree) {
  check_degree(exact_degree);
  // Square [0,1]^2 -> triangle: xi = u, eta = v (1 - u), Jacobian (1 - u).
  // The u-integrand gains one degree from the Jacobian.
  const SegmentRule gu = gauss_legendre((exact_degree + 1) / 2 + 1);
  const SegmentRule gv = gauss_legendre(exact_degree / 2 + 1);
  TriangleRule rule;
  rule.exact_degree = exact_degree;
  rule.points.reserve(gu.points.size() * gv.points.size());
  rule.weights.reserve(gu.points.size() * gv.points.size());
  for (std::size_t i = 0; i < gu.points.size(); ++i) {
    const double u = 0.5 * (gu.points[i] + 1.0);
    const double wu = 0.5 * gu.weights[i];
    for (std::size_t j = 0; j < gv.points.size(); ++j) {
      const double v = 0.5 * (gv.points[j] + 1.0);
      const double wv = 0.5 * gv.weights[j];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(wu * wv * (1.0 - u));
    }
  }
  return rule;
}

PhysicalRule map_to_segment(const SegmentRule& rule, const Point& a, const Point& b) {
  PhysicalRule out;
  const double half_length = 0.5 * (b - a).norm();
  out.points.reserve(rule.points.size());
  out.weights.reserve(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double s = 0.5 * (rule.points[q] + 1.0);
    out.points.push_back(a + s * (b - a));
    out.weights.push_back(rule.weights[q] * half_length);
  }
  return out;
}

PhysicalRule map_to_triangle(const TriangleRule& rule, const Point& a, const Point& b, const Point& c) {
  PhysicalRule out;
  const Vec2 e1 = b - a;
  const Vec2 e2 = c - a;
  const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  out.points.reserve(rule.points.size());
  out.weights.reserve(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    out.points.push_back(a + rule.points[q].x() * e1 + rule.points[q].y() * e2);
    out.weights.push_back(rule.weights[q] * jac);
  }
  return out;
}

}  // namespace pdwg
