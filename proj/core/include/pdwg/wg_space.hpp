#pragma once

#include "pdwg/basis.hpp"
#include "pdwg/mesh.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace pdwg {

/// Stabilization weights of the multiplier form c(., .).
struct Tau {
  double tau1 = 0.0;
  double tau2 = 0.0;
};

/// Weights suggested by the inf-sup analysis: none for l = k, a gradient
/// term for (k, l) = (1, 0), a Hessian term for l = k - 1 with k >= 2.
Tau default_tau(int k, int l);

/// True when (tau1, tau2) activates the term the regime requires (any
/// values are acceptable for l = k).
bool regime_consistent(int k, int l, Tau tau);

/// Weak function space W_h = {u0, ub, un} with the multiplier space M_h.
///
/// Global unknown layout: u0 element-major, then ub edge-major, then un
/// edge-major, then lambda element-major. u0 and lambda use the scaled
/// monomial basis of degree k on each triangle; ub (degree k) and un
/// (degree l) use Legendre polynomials in the global edge orientation. The
/// stored un coefficients describe the flux along the global edge normal;
/// triangle T sees sign(T, e) times that value.
class WgSpace {
public:
  /// Throws Error unless k >= 1, l in {k, k-1} and both weights are >= 0.
  WgSpace(std::shared_ptr<const Mesh> mesh, int k, int l, Tau tau);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] int l() const { return l_; }
  [[nodiscard]] Tau tau() const { return tau_; }

  [[nodiscard]] int dofs_u0() const { return poly_dim(k_); }
  [[nodiscard]] int dofs_ub() const { return k_ + 1; }
  [[nodiscard]] int dofs_un() const { return l_ + 1; }
  [[nodiscard]] int dofs_lambda() const { return poly_dim(k_); }
  /// u0 + three ub blocks + three un blocks.
  [[nodiscard]] int local_u_size() const { return dofs_u0() + 3 * dofs_ub() + 3 * dofs_un(); }

  [[nodiscard]] int u0_offset(int t) const { return t * dofs_u0(); }
  [[nodiscard]] int ub_offset(int e) const { return n_elem_u0_ + e * dofs_ub(); }
  [[nodiscard]] int un_offset(int e) const { return n_elem_u0_ + mesh_->num_edges() * dofs_ub() + e * dofs_un(); }
  [[nodiscard]] int lambda_offset(int t) const { return n_u_ + t * dofs_lambda(); }

  [[nodiscard]] int num_u() const { return n_u_; }
  [[nodiscard]] int num_lambda() const { return mesh_->num_triangles() * dofs_lambda(); }
  [[nodiscard]] int num_total() const { return num_u() + num_lambda(); }

  /// Global indices of the element-local u unknowns, ordered
  /// [u0 | ub on local edges 0,1,2 | un on local edges 0,1,2].
  [[nodiscard]] std::vector<int> local_u_dofs(int t) const;

  /// ub on Dirichlet edges and un on Neumann edges.
  [[nodiscard]] const std::vector<char>& constrained() const { return constrained_; }
  [[nodiscard]] bool is_constrained(int dof) const { return constrained_[dof] != 0; }

  [[nodiscard]] TriBasis element_basis(int t) const { return TriBasis::on_triangle(*mesh_, t, k_); }
  [[nodiscard]] EdgeBasis trace_basis(int e) const { return EdgeBasis::on_edge(*mesh_, e, k_); }
  [[nodiscard]] EdgeBasis flux_basis(int e) const { return EdgeBasis::on_edge(*mesh_, e, l_); }

private:
  std::shared_ptr<const Mesh> mesh_;
  int k_;
  int l_;
  Tau tau_;
  int n_elem_u0_ = 0;
  int n_u_ = 0;
  std::vector<char> constrained_;
};

std::shared_ptr<const WgSpace> build_space(std::shared_ptr<const Mesh> mesh, int k, int l, Tau tau);

}  // namespace pdwg
