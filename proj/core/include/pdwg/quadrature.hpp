#pragma once

#include "pdwg/mesh.hpp"

#include <vector>

namespace pdwg {

inline constexpr int kMaxQuadratureDegree = 20;

/// Rule on the reference segment [-1, 1]; weights sum to 2.
struct SegmentRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

/// Rule on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct TriangleRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

/// Quadrature points and weights on a physical cell (Jacobian folded in).
struct PhysicalRule {
  std::vector<Point> points;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (exact to degree 2n-1).
SegmentRule gauss_legendre(int n);

SegmentRule edge_quadrature(int exact_degree);

/// Collapsed (Duffy) tensor Gauss rule exact to the requested degree.
TriangleRule tri_quadrature(int exact_degree);

PhysicalRule map_to_segment(const SegmentRule& rule, const Point& a, const Point& b);
PhysicalRule map_to_triangle(const TriangleRule& rule, const Point& a, const Point& b, const Point& c);

}  // namespace pdwg
