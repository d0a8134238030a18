#pragma once

#include "pdwg/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace pdwg {

/// Number of monomials of total degree <= k in two variables.
constexpr int poly_dim(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

/// Scaled monomials ((x - xc)/h)^a ((y - yc)/h)^b with a + b <= degree,
/// ordered by total degree, then by a descending.
class TriBasis {
public:
  TriBasis(int degree, Point center, double scale);

  /// Basis on triangle t: centroid and diameter scaling.
  static TriBasis on_triangle(const Mesh& mesh, int t, int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const Point& center() const { return center_; }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] int dim() const { return static_cast<int>(exponents_.size()); }
  [[nodiscard]] const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

  void values(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const;
  /// out is dim x 2: column 0 holds d/dx, column 1 d/dy.
  void gradients(const Point& x, Eigen::Ref<Eigen::MatrixX2d> out) const;
  /// out is dim x 3: columns xx, xy, yy.
  void hessians(const Point& x, Eigen::Ref<Eigen::MatrixX3d> out) const;

private:
  int degree_;
  Point center_;
  double scale_;
  std::vector<std::array<int, 2>> exponents_;
};

/// Tabulated basis data: each matrix is (points x basis functions).
struct BasisTable {
  int deriv_order = 0;
  Eigen::MatrixXd values;
  Eigen::MatrixXd dx, dy;
  Eigen::MatrixXd dxx, dxy, dyy;
};

/// deriv_order 0 tabulates values, 1 adds gradients, 2 adds second
/// derivatives. Anything else throws.
BasisTable eval_tri_basis(const TriBasis& basis, std::span<const Point> pts, int deriv_order);

/// Legendre polynomials P_0..P_degree at t.
void legendre(int degree, double t, Eigen::Ref<Eigen::VectorXd> out);

/// Legendre basis on a segment, parameterized affinely from `start`
/// (t = -1) to `end` (t = +1). Mesh edges always use the lower-index vertex
/// as start so the basis is shared by both neighbours.
class EdgeBasis {
public:
  EdgeBasis(int degree, Point start, Point end);
  static EdgeBasis on_edge(const Mesh& mesh, int e, int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int dim() const { return degree_ + 1; }
  [[nodiscard]] double length() const { return (end_ - start_).norm(); }
  [[nodiscard]] double parameter(const Point& x) const;
  void values(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const;
  /// Integral of P_p^2 over the physical edge: length / (2p + 1).
  [[nodiscard]] double norm_squared(int p) const { return length() / (2.0 * p + 1.0); }

private:
  int degree_;
  Point start_;
  Point end_;
};

}  // namespace pdwg
