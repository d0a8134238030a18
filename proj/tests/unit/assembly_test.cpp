#include <pdwg/assembly.hpp>
#include <pdwg/error.hpp>
#include <pdwg/sparse.hpp>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

namespace pdwg {
namespace {

std::shared_ptr<const Mesh> tagged_mesh(const ProblemSpec& p, int refinements) {
  Mesh m = tag_boundary(coarse_mesh(p.domain), p.classifier);
  for (int r = 0; r < refinements; ++r) m = refine_uniform(m);
  return std::make_shared<const Mesh>(std::move(m));
}

struct Regime {
  int k;
  int l;
  Tau tau;
};

class AssemblyRegimes : public ::testing::TestWithParam<Regime> {};

TEST_P(AssemblyRegimes, SaddleMatrixIsSymmetric) {
  const Regime r = GetParam();
  ExampleId id;
  id.kind = ExampleKind::Ex2;
  const ProblemSpec p = builtin(id);
  const WgSpace space(tagged_mesh(p, 1), r.k, r.l, r.tau);
  const SaddleSystem sys = assemble(space, p, QuadratureSet::for_degree(r.k));
  const double scale = Eigen::MatrixXd(sys.matrix).cwiseAbs().maxCoeff();
  EXPECT_LE(asymmetry(sys.matrix), 1e-12 * scale);
  EXPECT_EQ(sys.size(), static_cast<int>(sys.rhs.size()));
  for (int i = 0; i < sys.size(); ++i) {
    EXPECT_EQ(sys.free_to_global[i] < space.num_u(), i < sys.num_free_primal);
  }
}

TEST_P(AssemblyRegimes, BlocksAreSymmetricPositiveSemidefinite) {
  const Regime r = GetParam();
  const ProblemSpec p = builtin(ExampleId{});
  const WgSpace space(tagged_mesh(p, 0), r.k, r.l, r.tau);
  const GlobalBlocks b = assemble_blocks(space, p, QuadratureSet::for_degree(r.k));
  for (const SparseMatrix* m : {&b.S, &b.C}) {
    const Eigen::MatrixXd d(*m);
    EXPECT_LE((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + d.cwiseAbs().maxCoeff()));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (d + d.transpose()));
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9 * (1.0 + eig.eigenvalues().cwiseAbs().maxCoeff()));
  }
  if (r.tau.tau1 == 0.0 && r.tau.tau2 == 0.0) {
    EXPECT_EQ(b.C.cwiseAbs().sum(), 0.0);
  } else {
    EXPECT_GT(b.C.cwiseAbs().sum(), 0.0);
  }
}

class EqualDegreeRegimes : public ::testing::TestWithParam<Regime> {};

TEST_P(EqualDegreeRegimes, PolynomialSolutionSatisfiesTheSystem) {
  const Regime r = GetParam();
  const ProblemSpec p = *manufactured_by_name(r.k == 1 ? "patch1" : "patch2");
  const QuadratureSet quad = QuadratureSet::for_degree(r.k);
  const WgSpace space(tagged_mesh(p, 1), r.k, r.l, r.tau);
  const SaddleSystem sys = assemble(space, p, quad);
  const Eigen::VectorXd qh = project_Qh(space, p, p.exact->u, p.exact->grad, quad);
  Eigen::VectorXd free(sys.size());
  for (int i = 0; i < sys.size(); ++i) free[i] = qh[sys.free_to_global[i]];
  const Eigen::VectorXd residual = sys.matrix * free - sys.rhs;
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-10 * (1.0 + sys.rhs.cwiseAbs().maxCoeff()));
  // Prescribed values are Q_h u on the constrained unknowns.
  for (int g = 0; g < space.num_u(); ++g) {
    if (space.is_constrained(g)) EXPECT_NEAR(sys.prescribed[g], qh[g], 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Regimes, AssemblyRegimes,
                         ::testing::Values(Regime{1, 1, {0, 0}}, Regime{1, 1, {1, 1}}, Regime{1, 0, {1, 0}},
                                           Regime{2, 2, {0, 0}}, Regime{2, 2, {1, 1}}, Regime{2, 1, {0, 1}}));
INSTANTIATE_TEST_SUITE_P(Regimes, EqualDegreeRegimes,
                         ::testing::Values(Regime{1, 1, {0, 0}}, Regime{1, 1, {1, 1}}, Regime{2, 2, {0, 0}},
                                           Regime{2, 2, {1, 1}}));

TEST(WeakGradient, VanishesOnConstants) {
  const ProblemSpec p = builtin(ExampleId{});
  const WgSpace space(tagged_mesh(p, 1), 2, 2, {});
  const QuadratureSet quad = QuadratureSet::for_degree(2);
  const Eigen::VectorXd qh = project_Qh(
      space, p, [](const Point&) { return 1.0; }, [](const Point&) { return Vec2::Zero().eval(); }, quad);
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const LocalWeakGradient g = weak_gradient(space, t, quad);
    const std::vector<int> dofs = space.local_u_dofs(t);
    Eigen::VectorXd local(g.matrix.cols());
    for (int i = 0; i < local.size(); ++i) local[i] = qh[dofs[i]];
    EXPECT_LT((g.matrix * local).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(WeakGradient, CommutesWithProjectionOnPolynomials) {
  const ProblemSpec p = builtin(ExampleId{});
  const QuadratureSet quad2 = QuadratureSet::for_degree(2);
  const WgSpace space(tagged_mesh(p, 2), 2, 2, {});
  const ScalarField w = [](const Point& x) { return 3.0 * x.x() * x.x() - x.x() * x.y() + 2.0 * x.y(); };
  const VectorField gw = [](const Point& x) { return Vec2(6.0 * x.x() - x.y(), -x.x() + 2.0); };
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    EXPECT_LT(commutativity_check(space, t, w, gw, quad2), 1e-12);
  }
}

TEST(WeakGradient, CommutesWithProjectionOnSmoothFunctions) {
  const ProblemSpec p = builtin(ExampleId{});
  const ScalarField w = [](const Point& x) { return std::sin(x.x()) * std::exp(x.y()); };
  const VectorField gw = [](const Point& x) {
    return Vec2(std::cos(x.x()) * std::exp(x.y()), std::sin(x.x()) * std::exp(x.y()));
  };
  for (int k = 1; k <= 3; ++k) {
    const WgSpace space(tagged_mesh(p, 2), k, k, {});
    for (int t = 0; t < space.mesh().num_triangles(); ++t) {
      EXPECT_LT(commutativity_check(space, t, w, gw, QuadratureSet::for_degree(k)), 1e-12);
    }
  }
}

TEST(Projection, ElementAndEdgeProjectionsReproducePolynomials) {
  const Mesh mesh = refine_uniform(coarse_mesh(Domain::unit_square()));
  const ScalarField f = [](const Point& x) { return 1.0 + 2.0 * x.x() - x.y() + x.x() * x.y(); };
  const TriangleRule rule = tri_quadrature(8);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriBasis basis = TriBasis::on_triangle(mesh, t, 2);
    const Eigen::VectorXd c = project_element(mesh, t, basis, f, rule);
    Eigen::VectorXd v(basis.dim());
    basis.values(mesh.centroid(t), v);
    EXPECT_NEAR(c.dot(v), f(mesh.centroid(t)), 1e-13);
  }
  const SegmentRule seg = edge_quadrature(8);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const EdgeBasis basis = EdgeBasis::on_edge(mesh, e, 2);
    const Eigen::VectorXd c = project_edge(mesh, e, basis, f, seg);
    const Point mid = mesh.edge_frame(e).midpoint;
    Eigen::VectorXd v(basis.dim());
    basis.values(mid, v);
    EXPECT_NEAR(c.dot(v), f(mid), 1e-13);
  }
}

TEST(Assembly, UnclassifiedBoundaryIsRejected) {
  const ProblemSpec p = builtin(ExampleId{});
  const WgSpace space(std::make_shared<const Mesh>(coarse_mesh(p.domain)), 1, 1, {});
  EXPECT_THROW(assemble(space, p, QuadratureSet::for_degree(1)), Error);
}

TEST(Assembly, ExpandRestoresPrescribedValues) {
  const ProblemSpec p = builtin(ExampleId{});
  const WgSpace space(tagged_mesh(p, 1), 1, 1, {});
  const SaddleSystem sys = assemble(space, p, QuadratureSet::for_degree(1));
  const Eigen::VectorXd free = Eigen::VectorXd::LinSpaced(sys.size(), 1.0, 2.0);
  const Eigen::VectorXd x = sys.expand(free);
  ASSERT_EQ(x.size(), space.num_total());
  for (int g = 0; g < space.num_total(); ++g) {
    if (sys.global_to_free[g] >= 0) {
      EXPECT_EQ(x[g], free[sys.global_to_free[g]]);
    } else {
      EXPECT_EQ(x[g], sys.prescribed[g]);
    }
  }
}

TEST(Assembly, QuadratureDefaultsTo2kPlus4) {
  EXPECT_GE(QuadratureSet::for_degree(1).cell.exact_degree, 6);
  EXPECT_GE(QuadratureSet::for_degree(2).edge.exact_degree, 8);
  EXPECT_GE(QuadratureSet::for_degree(2, 12).cell.exact_degree, 12);
}

}  // namespace
}  // namespace pdwg
