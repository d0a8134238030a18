#include "pdwg/problem.hpp"

#include "pdwg/error.hpp"
#include "pdwg/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace pdwg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOnBoundary = 1e-12;

bool near(double a, double b) { return std::abs(a - b) < kOnBoundary; }

EdgeTag neumann_if(bool cond) { return cond ? EdgeTag::Neumann : EdgeTag::Dirichlet; }

BoundaryClassifier neumann_on_left() {
  return [](const Point& m, const Vec2&) { return neumann_if(near(m.x(), 0.0)); };
}

BoundaryClassifier all_dirichlet() {
  return [](const Point&, const Vec2&) { return EdgeTag::Dirichlet; };
}

/// Dirichlet where the convection enters (b.n < 0); ties go to Neumann.
BoundaryClassifier inflow_dirichlet(VectorField b) {
  return [b = std::move(b)](const Point& m, const Vec2& n) { return neumann_if(!(b(m).dot(n) < 0.0)); };
}

NormalField flux_of_exact(ProblemSpec& p) {
  // Captures copies of the fields so the problem stays self-contained.
  return [a = p.diffusion, b = p.convection, ex = *p.exact](const Point& x, const Vec2& n) {
    return (a(x) * ex.grad(x) + b(x) * ex.u(x)).dot(n);
  };
}

Mat2 diag(double d0, double d1) {
  Mat2 m;
  m << d0, 0.0, 0.0, d1;
  return m;
}

ProblemSpec example1() {
  ProblemSpec p;
  p.name = "ex1";
  p.domain = Domain::unit_square();
  p.diffusion = [](const Point&) {
    Mat2 a;
    a << 1.0, 1.0, 1.0, 6.0;
    return a;
  };
  p.convection = [](const Point&) { return Vec2(1.0, 1.0); };
  p.exact = ExactSolution{
      [](const Point& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); },
      [](const Point& x) {
        return Vec2(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
                    kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
      }};
  // a11 u_xx + 2 a12 u_xy + a22 u_yy = -7 pi^2 ss + 2 pi^2 cc; div(b u) = u_x + u_y.
  p.load = [](const Point& x) {
    const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
    const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
    return 7.0 * kPi * kPi * sx * sy - 2.0 * kPi * kPi * cx * cy - kPi * (cx * sy + sx * cy);
  };
  p.dirichlet = p.exact->u;
  p.neumann = flux_of_exact(p);
  p.classifier = neumann_on_left();
  return p;
}

ProblemSpec example2() {
  ProblemSpec p;
  p.name = "ex2";
  p.domain = Domain::unit_square();
  p.diffusion = [](const Point& x) { return diag(1.0 + x.x(), 1.0 + x.y()); };
  p.convection = [](const Point& x) { return Vec2(std::exp(1.0 - x.x()), std::exp(x.x() * x.y())); };
  p.exact = ExactSolution{[](const Point& x) { return std::sin(x.x()) * std::cos(x.y()); },
                          [](const Point& x) {
                            return Vec2(std::cos(x.x()) * std::cos(x.y()),
                                        -std::sin(x.x()) * std::sin(x.y()));
                          }};
  p.load = [](const Point& pt) {
    const double x = pt.x(), y = pt.y();
    const double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y);
    const double div_diffusive = cx * cy - (1.0 + x) * sx * cy - sx * sy - (1.0 + y) * sx * cy;
    const double div_convective = std::exp(1.0 - x) * (cx - sx) * cy + std::exp(x * y) * sx * (x * cy - sy);
    return -(div_diffusive + div_convective);
  };
  p.dirichlet = p.exact->u;
  p.neumann = flux_of_exact(p);
  p.classifier = neumann_on_left();
  return p;
}

ProblemSpec example3(double eps, DomainKind domain) {
  PDWG_REQUIRE(eps > 0.0, Error, "ex3 requires epsilon > 0");
  ProblemSpec p;
  p.name = "ex3";
  p.domain = domain == DomainKind::LShape ? Domain::l_shape() : Domain::unit_square();
  p.diffusion = [eps](const Point&) { return diag(eps, eps); };
  p.convection = [](const Point&) { return Vec2(1.0, 1.0); };
  // u = p q exp(1 - x + y) with p = x + 1/2, q = y + 1/2.
  p.exact = ExactSolution{[](const Point& x) {
                            return (x.x() + 0.5) * (x.y() + 0.5) * std::exp(1.0 - x.x() + x.y());
                          },
                          [](const Point& x) {
                            const double pp = x.x() + 0.5, q = x.y() + 0.5;
                            const double e = std::exp(1.0 - x.x() + x.y());
                            return Vec2(q * e * (1.0 - pp), pp * e * (1.0 + q));
                          }};
  p.load = [eps](const Point& x) {
    const double pp = x.x() + 0.5, q = x.y() + 0.5;
    const double e = std::exp(1.0 - x.x() + x.y());
    const double uxx = q * e * (pp - 2.0);
    const double uyy = pp * e * (q + 2.0);
    const double ux = q * e * (1.0 - pp);
    const double uy = pp * e * (1.0 + q);
    return -eps * (uxx + uyy) - (ux + uy);
  };
  p.dirichlet = p.exact->u;
  p.neumann = flux_of_exact(p);
  p.classifier = all_dirichlet();
  p.note =
      "ex3: the published coefficient line lists a12 twice; the diffusion is taken as "
      "diag(eps, eps).";
  return p;
}

ProblemSpec rotating_flow(std::string name, double eps, int load, double freq) {
  PDWG_REQUIRE(load == 0 || load == 1, Error, name + " load must be 0 or 1");
  ProblemSpec p;
  p.name = std::move(name);
  p.domain = Domain::unit_square();
  p.diffusion = [eps](const Point&) { return diag(eps, eps); };
  p.convection = [](const Point& x) { return Vec2(x.y(), -x.x()); };
  p.load = [f = static_cast<double>(load)](const Point&) { return f; };
  p.dirichlet = [freq](const Point& x) { return std::sin(freq * x.x()); };
  p.neumann = [](const Point&, const Vec2&) { return 0.0; };
  return p;
}

ProblemSpec example4(int load) {
  ProblemSpec p = rotating_flow("ex4", 1e-4, load, 3.0);
  p.classifier = inflow_dirichlet(p.convection);
  return p;
}

ProblemSpec example5(int load, DomainKind domain) {
  ProblemSpec p = rotating_flow("ex5", 1e-5, load, 2.0);
  if (domain == DomainKind::LShape) {
    p.domain = Domain::l_shape();
    p.classifier = [](const Point& m, const Vec2&) {
      return neumann_if(near(m.x(), 1.0) || near(m.y(), 0.5));
    };
  } else {
    p.classifier = [](const Point& m, const Vec2&) {
      return neumann_if(near(m.x(), 1.0) || near(m.y(), 0.0));
    };
  }
  return p;
}

}  // namespace

double ProblemSpec::flux(const Point& x, const Vec2& n, double w, const Vec2& grad_w) const {
  return (diffusion(x) * grad_w + convection(x) * w).dot(n);
}

ProblemSpec builtin(const ExampleId& id) {
  const bool square = id.domain == DomainKind::UnitSquare;
  switch (id.kind) {
    case ExampleKind::Ex1:
      PDWG_REQUIRE(square, Error, "ex1 is defined on the unit square only");
      return example1();
    case ExampleKind::Ex2:
      PDWG_REQUIRE(square, Error, "ex2 is defined on the unit square only");
      return example2();
    case ExampleKind::Ex3:
      PDWG_REQUIRE(square || id.domain == DomainKind::LShape, Error, "ex3 domain must be square or lshape");
      return example3(id.epsilon, id.domain);
    case ExampleKind::Ex4:
      PDWG_REQUIRE(square, Error, "ex4 is defined on the unit square only");
      return example4(id.load);
    case ExampleKind::Ex5:
      PDWG_REQUIRE(square || id.domain == DomainKind::LShape, Error, "ex5 domain must be square or lshape");
      return example5(id.load, id.domain);
  }
  throw Error("unknown example id");
}

ExampleKind parse_example_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ex1") return ExampleKind::Ex1;
  if (lower == "ex2") return ExampleKind::Ex2;
  if (lower == "ex3") return ExampleKind::Ex3;
  if (lower == "ex4") return ExampleKind::Ex4;
  if (lower == "ex5") return ExampleKind::Ex5;
  throw Error("unknown example '" + std::string(name) + "'");
}

ProblemSpec manufacture(const ManufacturedInput& in) {
  ProblemSpec p;
  p.name = in.name;
  p.domain = in.domain;
  p.diffusion = in.a;
  p.convection = in.b;
  p.exact = ExactSolution{in.u, in.grad_u};
  p.load = [in](const Point& x) {
    const Mat2 a = in.a(x);
    const Mat2 hess = in.hessian_u(x);
    const Vec2 g = in.grad_u(x);
    return -(in.div_a(x).dot(g) + (a.array() * hess.array()).sum() + in.div_b(x) * in.u(x) +
             in.b(x).dot(g));
  };
  p.dirichlet = in.u;
  p.neumann = [in](const Point& x, const Vec2& n) { return (in.a(x) * in.grad_u(x) + in.b(x) * in.u(x)).dot(n); };
  p.classifier = in.classifier ? in.classifier : all_dirichlet();
  return p;
}

std::optional<ProblemSpec> manufactured_by_name(std::string_view name) {
  ManufacturedInput in;
  in.a = [](const Point&) {
    Mat2 a;
    a << 1.0, 1.0, 1.0, 6.0;
    return a;
  };
  in.div_a = [](const Point&) { return Vec2::Zero().eval(); };
  in.b = [](const Point&) { return Vec2(1.0, 1.0); };
  in.div_b = [](const Point&) { return 0.0; };
  in.classifier = neumann_on_left();
  if (name == "patch1") {
    in.name = "patch1";
    in.u = [](const Point& x) { return 1.0 + x.x() - 2.0 * x.y(); };
    in.grad_u = [](const Point&) { return Vec2(1.0, -2.0); };
    in.hessian_u = [](const Point&) { return Mat2::Zero().eval(); };
    return manufacture(in);
  }
  if (name == "patch2") {
    in.name = "patch2";
    in.u = [](const Point& x) { return x.x() * x.x() - x.x() * x.y() + 3.0; };
    in.grad_u = [](const Point& x) { return Vec2(2.0 * x.x() - x.y(), -x.x()); };
    in.hessian_u = [](const Point&) {
      Mat2 h;
      h << 2.0, -1.0, -1.0, 0.0;
      return h;
    };
    return manufacture(in);
  }
  return std::nullopt;
}

void check_diffusion(const ProblemSpec& problem, const Mesh& mesh, int quad_degree) {
  const TriangleRule rule = tri_quadrature(quad_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto v = mesh.vertices(t);
    const PhysicalRule q = map_to_triangle(rule, v[0], v[1], v[2]);
    for (const Point& x : q.points) {
      const Mat2 a = problem.diffusion(x);
      PDWG_REQUIRE(std::abs(a(0, 1) - a(1, 0)) <= 1e-14 * a.norm(), Error, "diffusion tensor is not symmetric");
      Eigen::SelfAdjointEigenSolver<Mat2> eig(a, Eigen::EigenvaluesOnly);
      PDWG_REQUIRE(eig.eigenvalues().minCoeff() > 0.0, Error, "diffusion tensor is not positive definite");
    }
  }
}

}  // namespace pdwg
