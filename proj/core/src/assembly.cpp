#include "pdwg/assembly.hpp"

#include "pdwg/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace pdwg {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplets = std::vector<Eigen::Triplet<double, int>>;

struct ElementEdge {
  int edge = -1;
  int sign = 0;
  Vec2 normal;  // outward for the element
  PhysicalRule rule;
};

struct ElementGeometry {
  PhysicalRule cell;
  std::array<ElementEdge, 3> edges;
  double h = 0.0;
};

ElementGeometry element_geometry(const Mesh& mesh, int t, const QuadratureSet& quad) {
  ElementGeometry g;
  const auto v = mesh.vertices(t);
  g.cell = map_to_triangle(quad.cell, v[0], v[1], v[2]);
  g.h = mesh.diameter(t);
  for (int j = 0; j < 3; ++j) {
    const auto ends = mesh.local_edge(t, j);
    const EdgeRef ref = mesh.tri_edges(t)[j];
    g.edges[j] = {ref.edge, ref.sign, mesh.outward_normal(t, j), map_to_segment(quad.edge, ends[0], ends[1])};
  }
  return g;
}

int local_sign(const Mesh& mesh, int t, int e, int* local_index = nullptr) {
  const auto& te = mesh.tri_edges(t);
  for (int j = 0; j < 3; ++j) {
    if (te[j].edge == e) {
      if (local_index != nullptr) *local_index = j;
      return te[j].sign;
    }
  }
  throw Error("edge does not belong to triangle");
}

}  // namespace

QuadratureSet QuadratureSet::for_degree(int k, int degree) {
  const int d = degree > 0 ? degree : 2 * k + 4;
  return {tri_quadrature(d), edge_quadrature(d)};
}

LocalWeakGradient weak_gradient(const WgSpace& space, int t, const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  const ElementGeometry geo = element_geometry(mesh, t, quad);
  const TriBasis phi = space.element_basis(t);
  TriBasis psi(space.k() - 1, mesh.centroid(t), mesh.diameter(t));
  const int n0 = phi.dim();
  const int ng = psi.dim();
  const int nb = space.dofs_ub();

  MatrixXd mass = MatrixXd::Zero(ng, ng);
  MatrixXd rhs = MatrixXd::Zero(2 * ng, n0 + 3 * nb);
  VectorXd pv(ng), fv(n0), cv(nb);
  Eigen::MatrixX2d pg(ng, 2);
  for (std::size_t q = 0; q < geo.cell.size(); ++q) {
    const Point& x = geo.cell.points[q];
    const double w = geo.cell.weights[q];
    psi.values(x, pv);
    psi.gradients(x, pg);
    phi.values(x, fv);
    mass.noalias() += w * pv * pv.transpose();
    // -(v0, div psi)
    rhs.block(0, 0, ng, n0).noalias() -= w * pg.col(0) * fv.transpose();
    rhs.block(ng, 0, ng, n0).noalias() -= w * pg.col(1) * fv.transpose();
  }
  for (int j = 0; j < 3; ++j) {
    const ElementEdge& ed = geo.edges[j];
    const EdgeBasis chi = space.trace_basis(ed.edge);
    for (std::size_t q = 0; q < ed.rule.size(); ++q) {
      const Point& x = ed.rule.points[q];
      const double w = ed.rule.weights[q];
      psi.values(x, pv);
      chi.values(x, cv);
      // <vb, psi.n>
      rhs.block(0, n0 + j * nb, ng, nb).noalias() += (w * ed.normal.x()) * pv * cv.transpose();
      rhs.block(ng, n0 + j * nb, ng, nb).noalias() += (w * ed.normal.y()) * pv * cv.transpose();
    }
  }
  Eigen::LLT<MatrixXd> llt(mass);
  PDWG_REQUIRE(llt.info() == Eigen::Success, Error, "element degenerate: singular local mass matrix");
  LocalWeakGradient g{std::move(psi), MatrixXd(2 * ng, n0 + 3 * nb)};
  g.matrix.topRows(ng) = llt.solve(rhs.topRows(ng));
  g.matrix.bottomRows(ng) = llt.solve(rhs.bottomRows(ng));
  return g;
}

LocalForms local_forms(const WgSpace& space, const ProblemSpec& problem, int t, const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  const ElementGeometry geo = element_geometry(mesh, t, quad);
  const TriBasis phi = space.element_basis(t);
  const LocalWeakGradient wg = weak_gradient(space, t, quad);
  const TriBasis& psi = wg.target;
  const int n0 = phi.dim();
  const int ng = psi.dim();
  const int nb = space.dofs_ub();
  const int nn = space.dofs_un();
  const int nloc = space.local_u_size();
  const int un_start = n0 + 3 * nb;
  const double h = geo.h;
  const Tau tau = space.tau();

  LocalForms lf;
  lf.S = MatrixXd::Zero(nloc, nloc);
  lf.B = MatrixXd::Zero(n0, nloc);
  lf.C = MatrixXd::Zero(n0, n0);
  lf.rhs = VectorXd::Zero(n0);

  // (a grad_w u, grad lambda) = K^T G with K[(d,m), r] = (psi_m, (a grad lambda_r)_d).
  MatrixXd K = MatrixXd::Zero(2 * ng, n0);
  VectorXd fv(n0), pv(ng);
  Eigen::MatrixX2d fg(n0, 2);
  Eigen::MatrixX3d fh(n0, 3);
  for (std::size_t q = 0; q < geo.cell.size(); ++q) {
    const Point& x = geo.cell.points[q];
    const double w = geo.cell.weights[q];
    phi.values(x, fv);
    phi.gradients(x, fg);
    psi.values(x, pv);
    const Mat2 a = problem.diffusion(x);
    const Vec2 b = problem.convection(x);
    const Eigen::MatrixX2d agrad = fg * a.transpose();  // row r: (a grad phi_r)^T
    K.topRows(ng).noalias() += w * pv * agrad.col(0).transpose();
    K.bottomRows(ng).noalias() += w * pv * agrad.col(1).transpose();
    // (b u0, grad lambda)
    lf.B.leftCols(n0).noalias() += w * (fg * b) * fv.transpose();
    lf.rhs.noalias() += (w * problem.load(x)) * fv;
    if (tau.tau1 > 0.0) lf.C.noalias() += (tau.tau1 * h * h * w) * fg * fg.transpose();
    if (tau.tau2 > 0.0) {
      phi.hessians(x, fh);
      const double c = tau.tau2 * h * h * h * h * w;
      // Mixed derivatives enter twice: (1,2) and (2,1).
      lf.C.noalias() += c * (fh.col(0) * fh.col(0).transpose() + 2.0 * fh.col(1) * fh.col(1).transpose() +
                             fh.col(2) * fh.col(2).transpose());
    }
  }
  lf.B.leftCols(n0 + 3 * nb).noalias() += K.transpose() * wg.matrix;

  const double w_trace = 1.0 / (h * h * h);
  const double w_flux = 1.0 / h;
  VectorXd cb(nb), cn(nn), d1(nloc), d2(nloc);
  for (int j = 0; j < 3; ++j) {
    const ElementEdge& ed = geo.edges[j];
    const EdgeBasis chi_b = space.trace_basis(ed.edge);
    const EdgeBasis chi_n = space.flux_basis(ed.edge);
    for (std::size_t q = 0; q < ed.rule.size(); ++q) {
      const Point& x = ed.rule.points[q];
      const double w = ed.rule.weights[q];
      phi.values(x, fv);
      phi.gradients(x, fg);
      chi_b.values(x, cb);
      chi_n.values(x, cn);
      const Mat2 a = problem.diffusion(x);
      const Vec2 b = problem.convection(x);

      // u0 - ub
      d1.setZero();
      d1.head(n0) = fv;
      d1.segment(n0 + j * nb, nb) = -cb;
      lf.S.noalias() += (w_trace * w) * d1 * d1.transpose();

      // (a grad u0 + b u0).n - un, with un seen through the element sign
      d2.setZero();
      d2.head(n0) = fg * (a.transpose() * ed.normal) + b.dot(ed.normal) * fv;
      d2.segment(un_start + j * nn, nn) = -static_cast<double>(ed.sign) * cn;
      lf.S.noalias() += (w_flux * w) * d2 * d2.transpose();

      // -<un, lambda>
      lf.B.middleCols(un_start + j * nn, nn).noalias() -= (static_cast<double>(ed.sign) * w) * fv * cn.transpose();
    }
  }
  return lf;
}

GlobalBlocks assemble_blocks(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  const int nt = mesh.num_triangles();
  const int n0 = space.dofs_lambda();
  const int nloc = space.local_u_size();
  Triplets ts, tb, tc;
  ts.reserve(static_cast<std::size_t>(nt) * nloc * nloc);
  tb.reserve(static_cast<std::size_t>(nt) * n0 * nloc);
  tc.reserve(static_cast<std::size_t>(nt) * n0 * n0);
  GlobalBlocks g;
  g.load = VectorXd::Zero(space.num_lambda());
  for (int t = 0; t < nt; ++t) {
    const LocalForms lf = local_forms(space, problem, t, quad);
    const std::vector<int> dofs = space.local_u_dofs(t);
    const int lam = t * n0;
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j)
        if (lf.S(i, j) != 0.0) ts.emplace_back(dofs[i], dofs[j], lf.S(i, j));
    for (int r = 0; r < n0; ++r) {
      for (int j = 0; j < nloc; ++j)
        if (lf.B(r, j) != 0.0) tb.emplace_back(lam + r, dofs[j], lf.B(r, j));
      for (int s = 0; s < n0; ++s)
        if (lf.C(r, s) != 0.0) tc.emplace_back(lam + r, lam + s, lf.C(r, s));
      g.load[lam + r] += lf.rhs[r];
    }
  }
  g.S.resize(space.num_u(), space.num_u());
  g.B.resize(space.num_lambda(), space.num_u());
  g.C.resize(space.num_lambda(), space.num_lambda());
  g.S.setFromTriplets(ts.begin(), ts.end());
  g.B.setFromTriplets(tb.begin(), tb.end());
  g.C.setFromTriplets(tc.begin(), tc.end());
  return g;
}

Eigen::VectorXd SaddleSystem::expand(const Eigen::VectorXd& free) const {
  PDWG_REQUIRE(free.size() == size(), Error, "solution length does not match the system");
  VectorXd x = prescribed;
  for (int i = 0; i < size(); ++i) x[free_to_global[i]] = free[i];
  return x;
}

Eigen::VectorXd project_element(const Mesh& mesh, int t, const TriBasis& basis, const ScalarField& f,
                                const TriangleRule& rule) {
  const auto v = mesh.vertices(t);
  const PhysicalRule cell = map_to_triangle(rule, v[0], v[1], v[2]);
  const int n = basis.dim();
  MatrixXd mass = MatrixXd::Zero(n, n);
  VectorXd rhs = VectorXd::Zero(n), fv(n);
  for (std::size_t q = 0; q < cell.size(); ++q) {
    basis.values(cell.points[q], fv);
    mass.noalias() += cell.weights[q] * fv * fv.transpose();
    rhs.noalias() += (cell.weights[q] * f(cell.points[q])) * fv;
  }
  Eigen::LLT<MatrixXd> llt(mass);
  PDWG_REQUIRE(llt.info() == Eigen::Success, Error, "element degenerate: singular local mass matrix");
  return llt.solve(rhs);
}

Eigen::VectorXd project_edge(const Mesh& mesh, int e, const EdgeBasis& basis,
                             const std::function<double(const Point&)>& f, const SegmentRule& rule) {
  const auto& [a, b] = mesh.edge(e);
  const PhysicalRule seg = map_to_segment(rule, mesh.point(a), mesh.point(b));
  VectorXd c = VectorXd::Zero(basis.dim()), cv(basis.dim());
  for (std::size_t q = 0; q < seg.size(); ++q) {
    basis.values(seg.points[q], cv);
    c.noalias() += (seg.weights[q] * f(seg.points[q])) * cv;
  }
  for (int p = 0; p < basis.dim(); ++p) c[p] /= basis.norm_squared(p);
  return c;
}

Eigen::VectorXd boundary_values(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  VectorXd x = VectorXd::Zero(space.num_total());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.tag(e) == EdgeTag::Dirichlet) {
      x.segment(space.ub_offset(e), space.dofs_ub()) =
          project_edge(mesh, e, space.trace_basis(e), problem.dirichlet, quad.edge);
    } else if (mesh.tag(e) == EdgeTag::Neumann) {
      const int t = mesh.edge_triangles(e)[0];
      int j = 0;
      const int sign = local_sign(mesh, t, e, &j);
      const Vec2 n = mesh.outward_normal(t, j);
      const auto g2 = [&](const Point& p) { return problem.neumann(p, n); };
      x.segment(space.un_offset(e), space.dofs_un()) =
          static_cast<double>(sign) * project_edge(mesh, e, space.flux_basis(e), g2, quad.edge);
    }
  }
  return x;
}

namespace {

void require_classified(const Mesh& mesh) {
  for (int e = 0; e < mesh.num_edges(); ++e) {
    PDWG_REQUIRE(mesh.tag(e) != EdgeTag::Unclassified, Error, "unclassified boundary edge " + std::to_string(e));
  }
}

}  // namespace

SaddleSystem assemble(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad) {
  require_classified(space.mesh());
  return assemble(space, problem, quad, assemble_blocks(space, problem, quad));
}

SaddleSystem assemble(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad,
                      const GlobalBlocks& blocks) {
  require_classified(space.mesh());
  PDWG_REQUIRE(blocks.S.rows() == space.num_u() && blocks.C.rows() == space.num_lambda(), Error,
               "assembled blocks do not match the space");
  const int nu = space.num_u();
  const int ntot = space.num_total();

  SaddleSystem sys;
  sys.prescribed = boundary_values(space, problem, quad);
  sys.global_to_free.assign(ntot, -1);
  for (int g = 0; g < ntot; ++g) {
    if (space.is_constrained(g)) continue;
    sys.global_to_free[g] = static_cast<int>(sys.free_to_global.size());
    sys.free_to_global.push_back(g);
    if (g < nu) ++sys.num_free_primal;
  }
  const int nf = sys.size();
  sys.rhs = VectorXd::Zero(nf);
  for (int i = 0; i < nf; ++i) {
    const int g = sys.free_to_global[i];
    if (g >= nu) sys.rhs[i] = blocks.load[g - nu];
  }

  Triplets trip;
  trip.reserve(static_cast<std::size_t>(blocks.S.nonZeros() + 2 * blocks.B.nonZeros() + blocks.C.nonZeros()));
  auto add = [&](int gi, int gj, double v) {
    const int fi = sys.global_to_free[gi];
    if (fi < 0) return;  // test functions vanish on prescribed unknowns
    const int fj = sys.global_to_free[gj];
    if (fj >= 0) {
      trip.emplace_back(fi, fj, v);
    } else {
      sys.rhs[fi] -= v * sys.prescribed[gj];
    }
  };
  for (int r = 0; r < blocks.S.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(blocks.S, r); it; ++it) add(it.row(), it.col(), it.value());
  for (int r = 0; r < blocks.B.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(blocks.B, r); it; ++it) {
      add(nu + it.row(), it.col(), it.value());
      add(it.col(), nu + it.row(), it.value());
    }
  }
  for (int r = 0; r < blocks.C.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(blocks.C, r); it; ++it) add(nu + it.row(), nu + it.col(), -it.value());

  sys.matrix.resize(nf, nf);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

Eigen::VectorXd project_Qh(const WgSpace& space, const ProblemSpec& coefficients, const ScalarField& w,
                           const VectorField& grad_w, const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  VectorXd x = VectorXd::Zero(space.num_total());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    x.segment(space.u0_offset(t), space.dofs_u0()) = project_element(mesh, t, space.element_basis(t), w, quad.cell);
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec2 n = mesh.edge_frame(e).normal;
    x.segment(space.ub_offset(e), space.dofs_ub()) = project_edge(mesh, e, space.trace_basis(e), w, quad.edge);
    const auto flux = [&](const Point& p) { return coefficients.flux(p, n, w(p), grad_w(p)); };
    x.segment(space.un_offset(e), space.dofs_un()) = project_edge(mesh, e, space.flux_basis(e), flux, quad.edge);
  }
  return x;
}

double commutativity_check(const WgSpace& space, int t, const ScalarField& w, const VectorField& grad_w,
                           const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  const LocalWeakGradient wg = weak_gradient(space, t, quad);
  const int n0 = space.dofs_u0();
  const int nb = space.dofs_ub();
  VectorXd local(n0 + 3 * nb);
  local.head(n0) = project_element(mesh, t, space.element_basis(t), w, quad.cell);
  for (int j = 0; j < 3; ++j) {
    const int e = mesh.tri_edges(t)[j].edge;
    local.segment(n0 + j * nb, nb) = project_edge(mesh, e, space.trace_basis(e), w, quad.edge);
  }
  const VectorXd weak = wg.matrix * local;

  const int ng = wg.target.dim();
  const ScalarField gx = [&](const Point& p) { return grad_w(p).x(); };
  const ScalarField gy = [&](const Point& p) { return grad_w(p).y(); };
  VectorXd diff(2 * ng);
  diff.head(ng) = weak.head(ng) - project_element(mesh, t, wg.target, gx, quad.cell);
  diff.tail(ng) = weak.tail(ng) - project_element(mesh, t, wg.target, gy, quad.cell);

  const auto v = mesh.vertices(t);
  const PhysicalRule cell = map_to_triangle(quad.cell, v[0], v[1], v[2]);
  VectorXd pv(ng);
  double sq = 0.0;
  for (std::size_t q = 0; q < cell.size(); ++q) {
    wg.target.values(cell.points[q], pv);
    const double ex = pv.dot(diff.head(ng));
    const double ey = pv.dot(diff.tail(ng));
    sq += cell.weights[q] * (ex * ex + ey * ey);
  }
  return std::sqrt(sq);
}

}  // namespace pdwg
