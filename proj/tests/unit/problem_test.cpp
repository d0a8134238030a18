#include <pdwg/error.hpp>
#include <pdwg/problem.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

namespace pdwg {
namespace {

// -div(a grad u + b u) by central differences of the exact flux.
double fd_load(const ProblemSpec& p, const Point& x, double step = 1e-5) {
  auto flux = [&p](const Point& y) -> Vec2 {
    return p.diffusion(y) * p.exact->grad(y) + p.convection(y) * p.exact->u(y);
  };
  const Vec2 ex(step, 0.0), ey(0.0, step);
  const double div = (flux(x + ex).x() - flux(x - ex).x() + flux(x + ey).y() - flux(x - ey).y()) / (2 * step);
  return -div;
}

void expect_load_consistent(const ProblemSpec& p) {
  ASSERT_TRUE(p.exact.has_value());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 25; ++i) {
    Point x(u(rng), u(rng));
    if (!p.domain.contains(x)) continue;
    const double f = p.load(x);
    EXPECT_NEAR(f, fd_load(p, x), 1e-5 * (1.0 + std::abs(f))) << p.name << " at " << x.transpose();
  }
}

void expect_gradient_consistent(const ProblemSpec& p) {
  const double step = 1e-6;
  for (const Point& x : {Point(0.3, 0.4), Point(0.7, 0.2), Point(0.1, 0.9)}) {
    const Vec2 g = p.exact->grad(x);
    const double gx = (p.exact->u(x + Vec2(step, 0)) - p.exact->u(x - Vec2(step, 0))) / (2 * step);
    const double gy = (p.exact->u(x + Vec2(0, step)) - p.exact->u(x - Vec2(0, step))) / (2 * step);
    EXPECT_NEAR(g.x(), gx, 1e-7 * (1.0 + std::abs(gx)));
    EXPECT_NEAR(g.y(), gy, 1e-7 * (1.0 + std::abs(gy)));
  }
}

class ExactExamples : public ::testing::TestWithParam<std::string> {};

ProblemSpec named(const std::string& name) {
  if (auto m = manufactured_by_name(name)) return *m;
  ExampleId id;
  id.kind = parse_example_kind(name);
  id.epsilon = 1e-2;
  return builtin(id);
}

TEST_P(ExactExamples, LoadMatchesDivergenceOfExactFlux) { expect_load_consistent(named(GetParam())); }

TEST_P(ExactExamples, GradientMatchesFiniteDifferences) { expect_gradient_consistent(named(GetParam())); }

TEST_P(ExactExamples, BoundaryDataComeFromExactSolution) {
  const ProblemSpec p = named(GetParam());
  const Point x(0.0, 0.37);
  const Vec2 n(-1.0, 0.0);
  EXPECT_DOUBLE_EQ(p.dirichlet(x), p.exact->u(x));
  EXPECT_NEAR(p.neumann(x, n), p.flux(x, n, p.exact->u(x), p.exact->grad(x)), 1e-14);
}

INSTANTIATE_TEST_SUITE_P(All, ExactExamples, ::testing::Values("ex1", "ex2", "ex3", "patch1", "patch2"));

TEST(Examples, Ex3OnLShapeKeepsTheSameSolution) {
  ExampleId id;
  id.kind = ExampleKind::Ex3;
  id.domain = DomainKind::LShape;
  id.epsilon = 1e-3;
  const ProblemSpec p = builtin(id);
  EXPECT_EQ(p.domain.kind, DomainKind::LShape);
  expect_load_consistent(p);
  EXPECT_FALSE(p.note.empty());
}

TEST(Examples, Ex1Coefficients) {
  const ProblemSpec p = builtin(ExampleId{});
  const Mat2 a = p.diffusion(Point(0.2, 0.3));
  EXPECT_EQ(a(0, 0), 1.0);
  EXPECT_EQ(a(0, 1), 1.0);
  EXPECT_EQ(a(1, 0), 1.0);
  EXPECT_EQ(a(1, 1), 6.0);
  EXPECT_EQ(p.convection(Point(0.5, 0.5)), Vec2(1.0, 1.0));
  EXPECT_NEAR(p.exact->u(Point(0.5, 0.5)), 1.0, 1e-15);
}

TEST(Examples, Ex1And2PutNeumannOnTheLeftEdge) {
  for (ExampleKind kind : {ExampleKind::Ex1, ExampleKind::Ex2}) {
    ExampleId id;
    id.kind = kind;
    const ProblemSpec p = builtin(id);
    EXPECT_EQ(p.classifier(Point(0.0, 0.5), Vec2(-1, 0)), EdgeTag::Neumann);
    EXPECT_EQ(p.classifier(Point(1.0, 0.5), Vec2(1, 0)), EdgeTag::Dirichlet);
    EXPECT_EQ(p.classifier(Point(0.5, 0.0), Vec2(0, -1)), EdgeTag::Dirichlet);
    EXPECT_EQ(p.classifier(Point(0.5, 1.0), Vec2(0, 1)), EdgeTag::Dirichlet);
  }
}

TEST(Examples, Ex4IsDirichletOnInflowOnly) {
  ExampleId id;
  id.kind = ExampleKind::Ex4;
  const ProblemSpec p = builtin(id);
  EXPECT_FALSE(p.exact.has_value());
  // b = (y, -x): inflow through x = 0 (b.n = -y) and y = 1 (b.n = -x).
  EXPECT_EQ(p.classifier(Point(0.0, 0.5), Vec2(-1, 0)), EdgeTag::Dirichlet);
  EXPECT_EQ(p.classifier(Point(0.5, 1.0), Vec2(0, 1)), EdgeTag::Dirichlet);
  EXPECT_EQ(p.classifier(Point(1.0, 0.5), Vec2(1, 0)), EdgeTag::Neumann);
  EXPECT_EQ(p.classifier(Point(0.5, 0.0), Vec2(0, -1)), EdgeTag::Neumann);
  EXPECT_NEAR(p.dirichlet(Point(0.2, 1.0)), std::sin(0.6), 1e-15);
  EXPECT_EQ(p.load(Point(0.3, 0.3)), 1.0);
}

TEST(Examples, Ex5BoundarySplitOnBothDomains) {
  ExampleId id;
  id.kind = ExampleKind::Ex5;
  id.load = 0;
  const ProblemSpec sq = builtin(id);
  EXPECT_EQ(sq.load(Point(0.3, 0.3)), 0.0);
  EXPECT_EQ(sq.classifier(Point(1.0, 0.5), Vec2(1, 0)), EdgeTag::Neumann);
  EXPECT_EQ(sq.classifier(Point(0.5, 0.0), Vec2(0, -1)), EdgeTag::Neumann);
  EXPECT_EQ(sq.classifier(Point(0.0, 0.5), Vec2(-1, 0)), EdgeTag::Dirichlet);
  EXPECT_NEAR(sq.dirichlet(Point(0.25, 1.0)), std::sin(0.5), 1e-15);
  id.domain = DomainKind::LShape;
  const ProblemSpec l = builtin(id);
  EXPECT_EQ(l.classifier(Point(0.75, 0.5), Vec2(0, -1)), EdgeTag::Neumann);
  EXPECT_EQ(l.classifier(Point(1.0, 0.75), Vec2(1, 0)), EdgeTag::Neumann);
  EXPECT_EQ(l.classifier(Point(0.5, 0.25), Vec2(1, 0)), EdgeTag::Dirichlet);
}

TEST(Examples, InvalidParametersAreRejected) {
  ExampleId id;
  id.domain = DomainKind::LShape;
  EXPECT_THROW(builtin(id), Error);  // ex1 on the L-shape
  id.kind = ExampleKind::Ex3;
  id.domain = DomainKind::UnitSquare;
  id.epsilon = 0.0;
  EXPECT_THROW(builtin(id), Error);
  id.kind = ExampleKind::Ex4;
  id.load = 2;
  EXPECT_THROW(builtin(id), Error);
  EXPECT_THROW(parse_example_kind("ex6"), Error);
  EXPECT_EQ(parse_example_kind("EX2"), ExampleKind::Ex2);
  EXPECT_FALSE(manufactured_by_name("nope").has_value());
}

TEST(Diffusion, RejectsIndefiniteTensor) {
  ProblemSpec p = builtin(ExampleId{});
  const Mesh mesh = coarse_mesh(p.domain);
  EXPECT_NO_THROW(check_diffusion(p, mesh, 4));
  p.diffusion = [](const Point&) {
    Mat2 a;
    a << 1.0, 2.0, 2.0, 1.0;
    return a;
  };
  EXPECT_THROW(check_diffusion(p, mesh, 4), Error);
  p.diffusion = [](const Point&) {
    Mat2 a;
    a << 1.0, 0.5, 0.0, 1.0;
    return a;
  };
  EXPECT_THROW(check_diffusion(p, mesh, 4), Error);
}

TEST(Manufacture, ProducesConsistentDataForVariableCoefficients) {
  ManufacturedInput in;
  in.u = [](const Point& x) { return std::exp(x.x()) * x.y() * x.y(); };
  in.grad_u = [](const Point& x) { return Vec2(std::exp(x.x()) * x.y() * x.y(), 2.0 * std::exp(x.x()) * x.y()); };
  in.hessian_u = [](const Point& x) {
    Mat2 h;
    h << std::exp(x.x()) * x.y() * x.y(), 2.0 * std::exp(x.x()) * x.y(), 2.0 * std::exp(x.x()) * x.y(),
        2.0 * std::exp(x.x());
    return h;
  };
  in.a = [](const Point& x) {
    Mat2 a;
    a << 2.0 + x.x(), 0.5 * x.y(), 0.5 * x.y(), 1.0 + x.x() * x.x();
    return a;
  };
  // Column divergence: j-th entry is sum_i d(a_ij)/dx_i.
  in.div_a = [](const Point&) { return Vec2(1.5, 0.0); };
  in.b = [](const Point& x) { return Vec2(x.y(), x.x() * x.x()); };
  in.div_b = [](const Point&) { return 0.0; };
  expect_load_consistent(manufacture(in));
}

}  // namespace
}  // namespace pdwg
