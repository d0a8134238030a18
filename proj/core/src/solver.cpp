#include "pdwg/solver.hpp"

#include "pdwg/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef PDWG_HAVE_UMFPACK
#include <umfpack.h>
#else
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#endif

namespace pdwg {

namespace {

using Eigen::VectorXd;
using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Below this the LU factors are treated as numerically singular.
constexpr double kSingularRcond = 1e-22;

double relative_residual(const SparseMatrix& a, const VectorXd& x, const VectorXd& b) {
  const double rn = (b - a * x).norm();
  const double bn = b.norm();
  return bn > 0.0 ? rn / bn : rn;
}

std::string format_residual(double r) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << r;
  return os.str();
}

#ifdef PDWG_HAVE_UMFPACK

/// Owns the symbolic and numeric UMFPACK objects of one factorization.
class UmfpackLU {
public:
  explicit UmfpackLU(const ColMatrix& a) : a_(a) {
    a_.makeCompressed();
    umfpack_di_defaults(control_);
    const int n = static_cast<int>(a_.rows());
    int status = umfpack_di_symbolic(n, n, a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr(), &symbolic_,
                                     control_, info_);
    PDWG_REQUIRE(status == UMFPACK_OK, Error, "UMFPACK symbolic analysis failed (status " + std::to_string(status) + ")");
    status = umfpack_di_numeric(a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr(), symbolic_, &numeric_,
                                control_, info_);
    PDWG_REQUIRE(status != UMFPACK_WARNING_singular_matrix, SingularSystemError,
                 "system singular: zero pivot in LU factorization");
    PDWG_REQUIRE(status == UMFPACK_OK, Error, "UMFPACK numeric factorization failed (status " + std::to_string(status) + ")");
    rcond_ = info_[UMFPACK_RCOND];
  }
  UmfpackLU(const UmfpackLU&) = delete;
  UmfpackLU& operator=(const UmfpackLU&) = delete;
  ~UmfpackLU() {
    if (numeric_ != nullptr) umfpack_di_free_numeric(&numeric_);
    if (symbolic_ != nullptr) umfpack_di_free_symbolic(&symbolic_);
  }

  [[nodiscard]] double rcond() const { return rcond_; }

  VectorXd solve(const VectorXd& b) {
    VectorXd x(b.size());
    const int status = umfpack_di_solve(UMFPACK_A, a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr(), x.data(),
                                        b.data(), numeric_, control_, info_);
    PDWG_REQUIRE(status == UMFPACK_OK, SingularSystemError,
                 "system singular: UMFPACK solve failed (status " + std::to_string(status) + ")");
    return x;
  }

private:
  ColMatrix a_;
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
  double control_[UMFPACK_CONTROL];
  double info_[UMFPACK_INFO];
  double rcond_ = 0.0;
};

#endif

SolveResult solve_direct(const SparseMatrix& a, const VectorXd& b, double tol) {
  SolveResult res;
  res.report.method = "direct";
  if (b.size() == 0) return res;
  const ColMatrix col(a);
#ifdef PDWG_HAVE_UMFPACK
  res.report.backend = "umfpack";
  UmfpackLU lu(col);
  res.report.rcond = lu.rcond();
  PDWG_REQUIRE(lu.rcond() > kSingularRcond, SingularSystemError,
               "system singular: reciprocal condition estimate " + format_residual(lu.rcond()));
  res.x = lu.solve(b);
#else
  res.report.backend = "eigen-sparselu";
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(col);
  PDWG_REQUIRE(lu.info() == Eigen::Success, SingularSystemError, "system singular: " + lu.lastErrorMessage());
  res.x = lu.solve(b);
  res.report.rcond = 0.0;
#endif
  res.report.iterations = 1;
  res.report.relative_residual = relative_residual(a, res.x, b);
  PDWG_REQUIRE(std::isfinite(res.report.relative_residual) && res.report.relative_residual <= tol, SingularSystemError,
               "system singular: direct solve residual " + format_residual(res.report.relative_residual) +
                   " exceeds tolerance");
  return res;
}

/// Diagonal SPD preconditioner: |diag| on the primal block and the diagonal
/// of C + B D^{-1} B^T on the multiplier block.
VectorXd block_diagonal_preconditioner(const SparseMatrix& a, int primal_size) {
  const int n = static_cast<int>(a.rows());
  const int np = primal_size < 0 ? n : primal_size;
  VectorXd d = VectorXd::Ones(n);
  for (int r = 0; r < np; ++r) {
    const double v = std::abs(a.coeff(r, r));
    if (v > 0.0) d[r] = v;
  }
  for (int r = np; r < n; ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      if (it.col() < np) {
        s += it.value() * it.value() / d[it.col()];
      } else if (it.col() == r) {
        s += std::abs(it.value());
      }
    }
    if (s > 0.0) d[r] = s;
  }
  return d;
}

/// Preconditioned MINRES (Paige-Saunders recurrences, Lanczos in the
/// preconditioner inner product).
SolveResult solve_minres(const SparseMatrix& a, const VectorXd& b, double tol, int max_iter, int primal_size) {
  SolveResult res;
  res.report.method = "minres";
  res.report.backend = "minres-blockdiag";
  const Eigen::Index n = b.size();
  res.x = VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return res;

  const VectorXd dinv = block_diagonal_preconditioner(a, primal_size).cwiseInverse();
  VectorXd v_prev = VectorXd::Zero(n);
  VectorXd v = b;
  VectorXd z = dinv.cwiseProduct(v);
  double gamma = std::sqrt(z.dot(v));
  double gamma_prev = 1.0;
  double eta = gamma;
  const double eta0 = gamma;
  double c_prev = 1.0, c = 1.0, s_prev = 0.0, s = 0.0;
  VectorXd w_prev = VectorXd::Zero(n), w = VectorXd::Zero(n);
  VectorXd az(n), v_next(n), z_next(n), w_next(n);

  int it = 0;
  for (; it < max_iter; ++it) {
    z /= gamma;
    az.noalias() = a * z;
    const double delta = az.dot(z);
    v_next = az - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
    z_next = dinv.cwiseProduct(v_next);
    const double gamma_next = std::sqrt(std::max(z_next.dot(v_next), 0.0));

    const double a0 = c * delta - c_prev * s * gamma;
    const double a1 = std::sqrt(a0 * a0 + gamma_next * gamma_next);
    const double a2 = s * delta + c_prev * c * gamma;
    const double a3 = s_prev * gamma;
    PDWG_REQUIRE(a1 > 0.0, SingularSystemError, "system singular: MINRES breakdown");
    const double c_next = a0 / a1;
    const double s_next = gamma_next / a1;
    w_next = (z - a3 * w_prev - a2 * w) / a1;
    res.x.noalias() += (c_next * eta) * w_next;
    eta = -s_next * eta;

    v_prev.swap(v);
    v.swap(v_next);
    z.swap(z_next);
    w_prev.swap(w);
    w.swap(w_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    c_prev = c;
    c = c_next;
    s_prev = s;
    s = s_next;

    // The recurrence tracks the preconditioned residual; confirm with the true one.
    if (std::abs(eta) <= tol * eta0 || gamma == 0.0) {
      res.report.relative_residual = relative_residual(a, res.x, b);
      if (res.report.relative_residual <= tol || gamma == 0.0) {
        ++it;
        break;
      }
    }
  }
  res.report.iterations = it;
  res.report.relative_residual = relative_residual(a, res.x, b);
  if (!(res.report.relative_residual <= tol)) {
    throw NotConvergedError("not converged: MINRES stopped after " + std::to_string(it) +
                                " iterations with relative residual " +
                                format_residual(res.report.relative_residual),
                            it, res.report.relative_residual);
  }
  return res;
}

}  // namespace

SolverMethod parse_solver_method(std::string_view name) {
  if (name == "direct") return SolverMethod::Direct;
  if (name == "minres") return SolverMethod::Minres;
  throw Error("unknown solver method '" + std::string(name) + "'");
}

std::string to_string(SolverMethod method) { return method == SolverMethod::Direct ? "direct" : "minres"; }

SolveResult solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& opts,
                         int primal_size) {
  PDWG_REQUIRE(a.rows() == a.cols() && a.rows() == b.size(), Error, "solve: dimension mismatch");
  if (opts.method == SolverMethod::Direct) {
    return solve_direct(a, b, opts.tol > 0.0 ? opts.tol : 1e-10);
  }
  return solve_minres(a, b, opts.tol > 0.0 ? opts.tol : 1e-9, opts.max_iter, primal_size);
}

SolveResult solve(const SaddleSystem& system, const SolverOptions& opts) {
  SolveResult res = solve_linear(system.matrix, system.rhs, opts, system.num_free_primal);
  res.x = system.expand(res.x);
  return res;
}

}  // namespace pdwg
