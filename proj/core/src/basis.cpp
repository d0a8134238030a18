#include "pdwg/basis.hpp"

#include "pdwg/error.hpp"

#include <cmath>
#include <string>

namespace pdwg {

namespace {

// x^n with x^(-1) treated as 0 for the derivative formulas.
double ipow(double x, int n) {
  if (n < 0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

TriBasis::TriBasis(int degree, Point center, double scale)
    : degree_(degree), center_(std::move(center)), scale_(scale) {
  PDWG_REQUIRE(degree >= 0, Error, "polynomial degree must be non-negative");
  PDWG_REQUIRE(scale > 0.0, Error, "basis scale must be positive");
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) exponents_.push_back({a, d - a});
}

TriBasis TriBasis::on_triangle(const Mesh& mesh, int t, int degree) {
  return TriBasis(degree, mesh.centroid(t), mesh.diameter(t));
}

void TriBasis::values(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const {
  const double s = (x.x() - center_.x()) / scale_;
  const double r = (x.y() - center_.y()) / scale_;
  for (int i = 0; i < dim(); ++i) {
    const auto [a, b] = exponents_[i];
    out[i] = ipow(s, a) * ipow(r, b);
  }
}

void TriBasis::gradients(const Point& x, Eigen::Ref<Eigen::MatrixX2d> out) const {
  const double s = (x.x() - center_.x()) / scale_;
  const double r = (x.y() - center_.y()) / scale_;
  const double inv = 1.0 / scale_;
  for (int i = 0; i < dim(); ++i) {
    const auto [a, b] = exponents_[i];
    out(i, 0) = a * ipow(s, a - 1) * ipow(r, b) * inv;
    out(i, 1) = b * ipow(s, a) * ipow(r, b - 1) * inv;
  }
}

void TriBasis::hessians(const Point& x, Eigen::Ref<Eigen::MatrixX3d> out) const {
  const double s = (x.x() - center_.x()) / scale_;
  const double r = (x.y() - center_.y()) / scale_;
  const double inv2 = 1.0 / (scale_ * scale_);
  for (int i = 0; i < dim(); ++i) {
    const auto [a, b] = exponents_[i];
    out(i, 0) = a * (a - 1) * ipow(s, a - 2) * ipow(r, b) * inv2;
    out(i, 1) = a * b * ipow(s, a - 1) * ipow(r, b - 1) * inv2;
    out(i, 2) = b * (b - 1) * ipow(s, a) * ipow(r, b - 2) * inv2;
  }
}

BasisTable eval_tri_basis(const TriBasis& basis, std::span<const Point> pts, int deriv_order) {
  PDWG_REQUIRE(deriv_order >= 0 && deriv_order <= 2, Error,
               "unsupported derivative order " + std::to_string(deriv_order));
  const auto np = static_cast<Eigen::Index>(pts.size());
  const int n = basis.dim();
  BasisTable table;
  table.deriv_order = deriv_order;
  table.values.resize(np, n);
  Eigen::VectorXd v(n);
  Eigen::MatrixX2d g(n, 2);
  Eigen::MatrixX3d hs(n, 3);
  if (deriv_order >= 1) {
    table.dx.resize(np, n);
    table.dy.resize(np, n);
  }
  if (deriv_order >= 2) {
    table.dxx.resize(np, n);
    table.dxy.resize(np, n);
    table.dyy.resize(np, n);
  }
  for (Eigen::Index q = 0; q < np; ++q) {
    basis.values(pts[q], v);
    table.values.row(q) = v.transpose();
    if (deriv_order >= 1) {
      basis.gradients(pts[q], g);
      table.dx.row(q) = g.col(0).transpose();
      table.dy.row(q) = g.col(1).transpose();
    }
    if (deriv_order >= 2) {
      basis.hessians(pts[q], hs);
      table.dxx.row(q) = hs.col(0).transpose();
      table.dxy.row(q) = hs.col(1).transpose();
      table.dyy.row(q) = hs.col(2).transpose();
    }
  }
  return table;
}

void legendre(int degree, double t, Eigen::Ref<Eigen::VectorXd> out) {
  out[0] = 1.0;
  if (degree >= 1) out[1] = t;
  for (int p = 2; p <= degree; ++p) {
    out[p] = ((2.0 * p - 1.0) * t * out[p - 1] - (p - 1.0) * out[p - 2]) / p;
  }
}

EdgeBasis::EdgeBasis(int degree, Point start, Point end)
    : degree_(degree), start_(std::move(start)), end_(std::move(end)) {
  PDWG_REQUIRE(degree >= 0, Error, "polynomial degree must be non-negative");
  PDWG_REQUIRE((end_ - start_).norm() > 0.0, Error, "degenerate edge");
}

EdgeBasis EdgeBasis::on_edge(const Mesh& mesh, int e, int degree) {
  const auto& [a, b] = mesh.edge(e);
  return EdgeBasis(degree, mesh.point(a), mesh.point(b));
}

double EdgeBasis::parameter(const Point& x) const {
  const Vec2 d = end_ - start_;
  return 2.0 * (x - start_).dot(d) / d.squaredNorm() - 1.0;
}

void EdgeBasis::values(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const {
  legendre(degree_, parameter(x), out);
}

}  // namespace pdwg
