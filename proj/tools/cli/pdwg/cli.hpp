#pragma once

#include <pdwg/analysis.hpp>
#include <pdwg/assembly.hpp>
#include <pdwg/error.hpp>
#include <pdwg/problem.hpp>
#include <pdwg/solver.hpp>
#include <pdwg/wg_space.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdwg::cli {

/// Invalid or inconsistent run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

struct StudyConfig {
  /// "ex1".."ex5", or a manufactured problem name such as "patch1".
  std::string example = "ex1";
  int k = 1;
  /// "k", "k-1" or an explicit integer.
  std::string l = "k";
  /// Unset weights fall back to default_tau(k, l).
  std::optional<double> tau1;
  std::optional<double> tau2;
  /// "square" or "lshape".
  std::string domain = "square";
  /// Mesh resolutions 1/h, strictly increasing.
  std::vector<int> levels;
  SolverOptions solver;
  /// Quadrature exactness; 0 or negative selects 2k + 4.
  int quad_degree = 0;
  std::filesystem::path out = "pdwg-out";
  double epsilon = 1e-10;
  int load = 1;
  int raster = 201;
  ErrorReference reference = ErrorReference::Projection;
};

/// Resolution 1/h of the unrefined coarse mesh.
inline constexpr int kCoarseInvH = 2;

/// Parses "4,8,16", "4..64" (doubling) and refinement counts written "r3".
/// Items may be mixed; the result is not validated.
std::vector<int> parse_levels(std::string_view text);

/// Number of uniform refinements that turn the coarse mesh into 1/h = inv_h.
/// Throws ConfigError unless inv_h is kCoarseInvH times a power of two.
int refinements_for(int inv_h);

/// Throws ConfigError for "k", "k-1" or an integer outside {k, k-1}.
int resolve_l(int k, std::string_view l);

Tau resolve_tau(const StudyConfig& config);

/// Throws ConfigError describing the first problem found.
void validate(const StudyConfig& config);

ProblemSpec make_problem(const StudyConfig& config);

/// Coarse mesh of the problem domain, refined and boundary-tagged.
std::shared_ptr<const Mesh> level_mesh(const ProblemSpec& problem, int inv_h);

/// Everything produced by one solve.
struct LevelRun {
  int inv_h = 0;
  int unknowns = 0;
  std::shared_ptr<const WgSpace> space;
  Eigen::VectorXd x;
  SolveReport solve;
  /// Norm fields stay zero when the problem has no exact solution.
  LevelErrors errors;
  double seconds = 0.0;
};

/// Builds, assembles, solves and analyses one level. Solver failures
/// propagate as SingularSystemError or NotConvergedError.
LevelRun run_level(const StudyConfig& config, const ProblemSpec& problem, int inv_h);

struct StudyResult {
  ErrorReport report;
  bool has_exact = false;
  /// Successful levels, in ladder order, up to the first failure.
  std::vector<LevelRun> runs;
  /// Message of the first failing level; empty on success.
  std::string failure;
  std::vector<std::filesystem::path> written;
};

/// Row labels of the study outputs.
StudyLabels study_labels(const StudyConfig& config, const ProblemSpec& problem);

/// Concurrent level count: PDWG_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
int thread_cap();

/// Runs every level (concurrently up to thread_cap()), then writes
/// study.md and study.csv (with an exact solution) and raster.csv for the
/// finest level (without one) into config.out. Progress goes to `log`.
StudyResult run_study(const StudyConfig& config, std::ostream& log);

/// One line of a property suite.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quadrature rules integrate monomials up to their declared degree to
/// `tol` relative error.
CheckResult check_quadrature(double tol = 1e-13);

/// Basis gradients and second derivatives against central differences.
CheckResult check_basis_derivatives(double tol = 1e-6);

/// grad_w(Q_h p) = Q(grad p) for every monomial p of degree <= k on a mesh
/// refined twice.
CheckResult check_commutativity(int k, double tol = 1e-12);

/// Solves the polynomial patch problem of degree k with l = k and compares
/// the solution with Q_h u and lambda = 0.
CheckResult check_patch(int k, double tol = 1e-9, Tau tau = {});

/// Conservation residual and flux jump after a solve of the configured
/// problem at 1/h = inv_h.
CheckResult check_conservation(const StudyConfig& config, int inv_h);

/// Zero data must give the zero solution for (k, l, tau).
CheckResult check_uniqueness(int k, int l, Tau tau, double tol = 1e-11);

/// Prints one verdict line per property; returns the number of failures.
/// The regime check uses the k, l and tau settings of `config`.
int run_verify(const StudyConfig& config, std::ostream& os);

/// Entry point of the pdwg executable.
int run_main(int argc, char** argv);

}  // namespace pdwg::cli
