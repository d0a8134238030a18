#pragma once

#include "pdwg/assembly.hpp"
#include "pdwg/sparse.hpp"

#include <Eigen/Core>

#include <string>
#include <string_view>

namespace pdwg {

enum class SolverMethod { Direct, Minres };

SolverMethod parse_solver_method(std::string_view name);
std::string to_string(SolverMethod method);

struct SolverOptions {
  SolverMethod method = SolverMethod::Direct;
  /// Relative residual target; <= 0 selects 1e-10 (direct) or 1e-9 (MINRES).
  double tol = 0.0;
  int max_iter = 50000;
};

struct SolveReport {
  std::string method;
  std::string backend;
  int iterations = 0;
  /// Reciprocal condition estimate of the LU factors (direct only).
  double rcond = 0.0;
  double relative_residual = 0.0;
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

/// Solves A x = b for a symmetric (possibly indefinite) A. The first
/// `primal_size` unknowns form the primal block used by the MINRES
/// block-diagonal preconditioner; -1 treats every unknown as primal.
///
/// Throws SingularSystemError when the factorization breaks down and
/// NotConvergedError when MINRES exhausts its iteration budget.
SolveResult solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& opts,
                         int primal_size = -1);

/// Solves the saddle-point system; `x` is the expanded global vector.
SolveResult solve(const SaddleSystem& system, const SolverOptions& opts);

}  // namespace pdwg
