#include "pdwg/wg_space.hpp"

#include "pdwg/error.hpp"

#include <string>

namespace pdwg {

Tau default_tau(int k, int l) {
  if (l == k) return {0.0, 0.0};
  if (k == 1) return {1.0, 0.0};
  return {0.0, 1.0};
}

bool regime_consistent(int k, int l, Tau tau) {
  if (l == k) return true;
  if (k == 1) return tau.tau1 > 0.0;
  return tau.tau2 > 0.0;
}

WgSpace::WgSpace(std::shared_ptr<const Mesh> mesh, int k, int l, Tau tau)
    : mesh_(std::move(mesh)), k_(k), l_(l), tau_(tau) {
  PDWG_REQUIRE(mesh_ != nullptr, Error, "space needs a mesh");
  PDWG_REQUIRE(k >= 1, Error, "invalid (k, l): k must be at least 1, got " + std::to_string(k));
  PDWG_REQUIRE(l == k || l == k - 1, Error,
               "invalid (k, l): l must be k or k-1, got (" + std::to_string(k) + ", " + std::to_string(l) + ")");
  PDWG_REQUIRE(tau.tau1 >= 0.0 && tau.tau2 >= 0.0, Error, "stabilization weights must be non-negative");

  n_elem_u0_ = mesh_->num_triangles() * dofs_u0();
  n_u_ = n_elem_u0_ + mesh_->num_edges() * (dofs_ub() + dofs_un());
  constrained_.assign(num_total(), 0);
  for (int e = 0; e < mesh_->num_edges(); ++e) {
    if (mesh_->tag(e) == EdgeTag::Dirichlet) {
      for (int p = 0; p < dofs_ub(); ++p) constrained_[ub_offset(e) + p] = 1;
    } else if (mesh_->tag(e) == EdgeTag::Neumann) {
      for (int p = 0; p < dofs_un(); ++p) constrained_[un_offset(e) + p] = 1;
    }
  }
}

std::vector<int> WgSpace::local_u_dofs(int t) const {
  std::vector<int> dofs;
  dofs.reserve(local_u_size());
  for (int i = 0; i < dofs_u0(); ++i) dofs.push_back(u0_offset(t) + i);
  const auto& te = mesh_->tri_edges(t);
  for (const EdgeRef& r : te)
    for (int p = 0; p < dofs_ub(); ++p) dofs.push_back(ub_offset(r.edge) + p);
  for (const EdgeRef& r : te)
    for (int p = 0; p < dofs_un(); ++p) dofs.push_back(un_offset(r.edge) + p);
  return dofs;
}

std::shared_ptr<const WgSpace> build_space(std::shared_ptr<const Mesh> mesh, int k, int l, Tau tau) {
  return std::make_shared<const WgSpace>(std::move(mesh), k, l, tau);
}

}  // namespace pdwg
