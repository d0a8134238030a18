#pragma once

#include "pdwg/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace pdwg {

using Mat2 = Eigen::Matrix2d;
using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Vec2(const Point&)>;
using TensorField = std::function<Mat2(const Point&)>;
/// Boundary datum depending on the outward unit normal.
using NormalField = std::function<double(const Point&, const Vec2&)>;

struct ExactSolution {
  ScalarField u;
  VectorField grad;
};

/// -div(a grad u + b u) = f in the domain, u = g1 on the Dirichlet part,
/// (a grad u + b u).n = g2 on the Neumann part. All callbacks must be pure.
struct ProblemSpec {
  std::string name;
  Domain domain;
  TensorField diffusion;
  VectorField convection;
  ScalarField load;
  ScalarField dirichlet;
  NormalField neumann;
  BoundaryClassifier classifier;
  std::optional<ExactSolution> exact;
  /// Free-form remark printed by the CLI when the problem is selected.
  std::string note;

  /// Total flux (a grad w + b w).n for a known field w.
  [[nodiscard]] double flux(const Point& x, const Vec2& n, double w, const Vec2& grad_w) const;
};

enum class ExampleKind { Ex1, Ex2, Ex3, Ex4, Ex5 };

struct ExampleId {
  ExampleKind kind = ExampleKind::Ex1;
  /// Diffusion magnitude for Ex3.
  double epsilon = 1e-10;
  /// Constant load for Ex4 and Ex5: 0 or 1.
  int load = 1;
  /// Ex3 and Ex5 may run on the L-shaped domain; the rest use the unit square.
  DomainKind domain = DomainKind::UnitSquare;
};

/// The five reference problems. Throws Error for out-of-range parameters.
ProblemSpec builtin(const ExampleId& id);

/// Parses "ex1".."ex5" (case-insensitive). Throws Error("unknown example ...").
ExampleKind parse_example_kind(std::string_view name);

struct ManufacturedInput {
  std::string name = "manufactured";
  ScalarField u;
  VectorField grad_u;
  TensorField hessian_u;
  TensorField a;
  /// Column divergence of a: component j is sum_i d(a_ij)/dx_i.
  VectorField div_a;
  VectorField b;
  ScalarField div_b;
  Domain domain = Domain::unit_square();
  BoundaryClassifier classifier;
};

/// Builds f = -(div_a . grad u + a : hess u + (div b) u + b . grad u),
/// g1 = u and g2 = (a grad u + b u).n from the supplied exact solution.
ProblemSpec manufacture(const ManufacturedInput& in);

/// Polynomial patch problems with the Ex1 coefficients and boundary split:
/// "patch1" has u = 1 + x - 2y, "patch2" has u = x^2 - x y + 3.
std::optional<ProblemSpec> manufactured_by_name(std::string_view name);

/// Checks that the diffusion tensor is symmetric positive definite at the
/// quadrature points of every triangle. Throws Error otherwise.
void check_diffusion(const ProblemSpec& problem, const Mesh& mesh, int quad_degree);

}  // namespace pdwg
