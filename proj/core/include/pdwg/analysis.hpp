#pragma once

#include "pdwg/assembly.hpp"
#include "pdwg/problem.hpp"
#include "pdwg/wg_space.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdwg {

/// The four L2-type error norms of a discrete solution.
struct ErrorNorms {
  double e0 = 0.0;
  double grad_e0 = 0.0;
  double eb = 0.0;
  double en = 0.0;
};

/// Per-level row of a convergence study.
struct LevelErrors {
  int inv_h = 0;
  double h = 0.0;
  ErrorNorms norms;
  /// s(e, e)^(1/2) with e = u_h - Q_h u.
  double energy_u = 0.0;
  /// c(lambda_h, lambda_h)^(1/2).
  double energy_lambda = 0.0;
  double max_conservation = 0.0;
  double max_flux_jump = 0.0;
};

/// Observed orders between a level and the previous one; empty when either
/// error vanishes.
struct LevelRates {
  std::optional<double> e0;
  std::optional<double> grad_e0;
  std::optional<double> eb;
  std::optional<double> en;
};

struct ErrorReport {
  std::vector<LevelErrors> levels;
  /// Same length as levels; the first entry is always empty.
  std::vector<LevelRates> rates;
};

/// What the discrete solution is compared with.
enum class ErrorReference {
  /// Q_h u: u0 - Q_0 u, ub - Q_b u, un - Q_n((a grad u + b u).n).
  Projection,
  /// The exact functions: u0 - u, ub - u, un - (a grad u + b u).n.
  Exact,
};

ErrorReference parse_error_reference(std::string_view name);
std::string to_string(ErrorReference ref);

/// Broken L2 / H1 norms of e0 and the h-weighted boundary norms
/// sqrt(sum_T h_T ||e||^2_{dT}) of eb and en, with en compared along each
/// element's outward normal. `x` is a global coefficient vector. Throws
/// Error when the problem has no exact solution.
ErrorNorms error_norms(const WgSpace& space, const ProblemSpec& problem, const Eigen::VectorXd& x,
                       const QuadratureSet& quad, ErrorReference ref = ErrorReference::Projection);

/// r_T = | -integral of un over dT (outward) - integral of f over T | per triangle.
Eigen::VectorXd conservation_residual(const WgSpace& space, const ProblemSpec& problem, const Eigen::VectorXd& x,
                                      const QuadratureSet& quad);

/// Largest |F.n1 + F.n2| over interior edges and edge quadrature points,
/// where each side reads the shared un coefficients through its own sign.
double flux_jump(const WgSpace& space, const Eigen::VectorXd& x, const QuadratureSet& quad);

/// ||f||_{L2(domain)} by the cell rule.
double load_norm(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad);

struct DiscreteSeminorms {
  double energy_u = 0.0;
  double energy_lambda = 0.0;
};

/// s(u_h - Q_h u, u_h - Q_h u)^(1/2) and c(lambda_h, lambda_h)^(1/2). Pass an
/// empty `qh` when no exact solution is known; the primal seminorm is then
/// taken of u_h itself.
DiscreteSeminorms discrete_seminorms(const WgSpace& space, const GlobalBlocks& blocks, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& qh);

/// log2(coarse / fine).
std::optional<double> observed_rate(double coarse, double fine);

/// Fills report.rates from report.levels.
void compute_rates(ErrorReport& report);

/// u0 sampled on a uniform grid over the domain's bounding box. Row-major
/// with x varying fastest; nodes outside the mesh hold NaN.
struct Raster {
  int nx = 0;
  int ny = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> u;
  std::vector<char> inside;
};

Raster sample_field(const WgSpace& space, const Eigen::VectorXd& x, int nx = 201, int ny = 201);

/// CSV with header "x,y,u"; outside nodes are written as "nan".
void write_raster_csv(std::ostream& os, const Raster& raster);

/// Labels repeated on every row of the study CSV.
struct StudyLabels {
  std::string example;
  int k = 1;
  int l = 1;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

/// Columns example,k,l,tau1,tau2,inv_h,e0,rate_e0,grad_e0,rate_grad,eb,
/// rate_eb,en,rate_en,cons_resid. Rate cells are empty when undefined.
void write_study_csv(std::ostream& os, const StudyLabels& labels, const ErrorReport& report);

/// Markdown table with one row per level: norms, rates, conservation.
void write_markdown_table(std::ostream& os, const StudyLabels& labels, const ErrorReport& report);

}  // namespace pdwg
