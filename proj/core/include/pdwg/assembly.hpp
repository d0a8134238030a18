#pragma once

#include "pdwg/problem.hpp"
#include "pdwg/quadrature.hpp"
#include "pdwg/sparse.hpp"
#include "pdwg/wg_space.hpp"

#include <Eigen/Core>

#include <vector>

namespace pdwg {

/// Reference rules shared by every element of one assembly pass.
struct QuadratureSet {
  TriangleRule cell;
  SegmentRule edge;

  /// Exactness 2k + 4 on cells and edges unless `degree` > 0 overrides it.
  static QuadratureSet for_degree(int k, int degree = -1);
};

/// Discrete weak gradient of one triangle, valued in [P_{k-1}]^2.
///
/// `matrix` maps the element-local (u0, ub on local edges 0..2) coefficients
/// to gradient coefficients ordered [x-component | y-component] in the
/// scaled monomial basis `target`.
struct LocalWeakGradient {
  TriBasis target;
  Eigen::MatrixXd matrix;
};

LocalWeakGradient weak_gradient(const WgSpace& space, int t, const QuadratureSet& quad);

/// Element contributions: S on the local u unknowns (layout of
/// WgSpace::local_u_dofs), B with lambda rows and local u columns, C on
/// lambda, and the load vector (f, sigma).
struct LocalForms {
  Eigen::MatrixXd S;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::VectorXd rhs;
};

LocalForms local_forms(const WgSpace& space, const ProblemSpec& problem, int t, const QuadratureSet& quad);

/// Unconstrained global blocks over all unknowns (no boundary elimination).
struct GlobalBlocks {
  SparseMatrix S;  // num_u x num_u
  SparseMatrix B;  // num_lambda x num_u
  SparseMatrix C;  // num_lambda x num_lambda
  Eigen::VectorXd load;  // num_lambda
};

GlobalBlocks assemble_blocks(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad);

/// [[S, B^T], [B, -C]] restricted to the free unknowns. Prescribed boundary
/// coefficients are moved to the right-hand side; free unknowns keep their
/// global order, so all primal unknowns precede the multipliers.
struct SaddleSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<int> free_to_global;
  std::vector<int> global_to_free;  // -1 for prescribed unknowns
  Eigen::VectorXd prescribed;       // global length; zero on free unknowns
  int num_free_primal = 0;

  [[nodiscard]] int size() const { return static_cast<int>(free_to_global.size()); }
  /// Global coefficient vector from a free-unknown solution.
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
};

/// Throws Error if any boundary edge is still unclassified.
SaddleSystem assemble(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad);
/// Same, reusing blocks already produced by assemble_blocks.
SaddleSystem assemble(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad,
                      const GlobalBlocks& blocks);

/// Prescribed coefficients: Q_b g1 on Dirichlet edges, Q_n g2 (outward
/// normal of the adjacent triangle, stored in global orientation) on Neumann
/// edges. Global length, zero elsewhere.
Eigen::VectorXd boundary_values(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad);

/// L2 projection onto the scaled monomials of degree `basis.degree()` on triangle t.
Eigen::VectorXd project_element(const Mesh& mesh, int t, const TriBasis& basis, const ScalarField& f,
                                const TriangleRule& rule);

/// L2 projection onto the Legendre basis of an edge.
Eigen::VectorXd project_edge(const Mesh& mesh, int e, const EdgeBasis& basis,
                             const std::function<double(const Point&)>& f, const SegmentRule& rule);

/// Q_h w = {Q_0 w, Q_b w, Q_n((a grad w + b w).n)} as a global vector whose
/// multiplier part is zero. Flux coefficients use the global edge normal.
Eigen::VectorXd project_Qh(const WgSpace& space, const ProblemSpec& coefficients, const ScalarField& w,
                           const VectorField& grad_w, const QuadratureSet& quad);

/// ||grad_w(Q_h w) - Q^{(k-1)}(grad w)||_{L2(T)}.
double commutativity_check(const WgSpace& space, int t, const ScalarField& w, const VectorField& grad_w,
                           const QuadratureSet& quad);

}  // namespace pdwg
