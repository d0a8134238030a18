#include "pdwg/analysis.hpp"

#include "pdwg/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>

namespace pdwg {

namespace {

using Eigen::VectorXd;

// Pairwise summation keeps the reduction order fixed regardless of how the
// per-element terms were produced.
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string fmt_rate(const std::optional<double>& r, const char* pattern) {
  return r ? fmt(pattern, *r) : std::string();
}

PhysicalRule cell_rule(const Mesh& mesh, int t, const QuadratureSet& quad) {
  const auto v = mesh.vertices(t);
  return map_to_triangle(quad.cell, v[0], v[1], v[2]);
}

}  // namespace

ErrorReference parse_error_reference(std::string_view name) {
  if (name == "projection") return ErrorReference::Projection;
  if (name == "exact") return ErrorReference::Exact;
  throw Error("unknown error reference '" + std::string(name) + "'");
}

std::string to_string(ErrorReference ref) { return ref == ErrorReference::Projection ? "projection" : "exact"; }

ErrorNorms error_norms(const WgSpace& space, const ProblemSpec& problem, const Eigen::VectorXd& x,
                       const QuadratureSet& quad, ErrorReference ref) {
  PDWG_REQUIRE(problem.exact.has_value(), Error, "missing exact solution for problem '" + problem.name + "'");
  PDWG_REQUIRE(x.size() >= space.num_u(), Error, "solution vector too short");
  const Mesh& mesh = space.mesh();
  const ExactSolution& ex = *problem.exact;
  const bool projected = ref == ErrorReference::Projection;
  const int nb = space.dofs_ub();
  const int nn = space.dofs_un();

  // Edge coefficients, less their projections when comparing with Q_h u.
  std::vector<VectorXd> trace_diff(mesh.num_edges()), flux_diff(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    trace_diff[e] = x.segment(space.ub_offset(e), nb);
    flux_diff[e] = x.segment(space.un_offset(e), nn);
    if (!projected) continue;
    const Vec2 n = mesh.edge_frame(e).normal;
    const auto flux = [&](const Point& p) { return problem.flux(p, n, ex.u(p), ex.grad(p)); };
    trace_diff[e] -= project_edge(mesh, e, space.trace_basis(e), ex.u, quad.edge);
    flux_diff[e] -= project_edge(mesh, e, space.flux_basis(e), flux, quad.edge);
  }

  const int nt = mesh.num_triangles();
  std::vector<double> l2(nt), h1(nt), tb(nt), tn(nt);
  for (int t = 0; t < nt; ++t) {
    const TriBasis phi = space.element_basis(t);
    VectorXd d = x.segment(space.u0_offset(t), phi.dim());
    if (projected) d -= project_element(mesh, t, phi, ex.u, quad.cell);
    const PhysicalRule cell = cell_rule(mesh, t, quad);
    VectorXd fv(phi.dim());
    Eigen::MatrixX2d fg(phi.dim(), 2);
    double sl2 = 0.0, sh1 = 0.0;
    for (std::size_t q = 0; q < cell.size(); ++q) {
      const Point& p = cell.points[q];
      phi.values(p, fv);
      phi.gradients(p, fg);
      double v = fv.dot(d);
      Vec2 g = fg.transpose() * d;
      if (!projected) {
        v -= ex.u(p);
        g -= ex.grad(p);
      }
      sl2 += cell.weights[q] * v * v;
      sh1 += cell.weights[q] * g.squaredNorm();
    }
    l2[t] = sl2;
    h1[t] = sh1;

    // Orientation only flips the sign of the flux difference, so the
    // squared element-local integrand equals the global one.
    double sb = 0.0, sn = 0.0;
    for (int j = 0; j < 3; ++j) {
      const int e = mesh.tri_edges(t)[j].edge;
      const Vec2 n = mesh.edge_frame(e).normal;
      const EdgeBasis chi_b = space.trace_basis(e);
      const EdgeBasis chi_n = space.flux_basis(e);
      VectorXd cb(chi_b.dim()), cn(chi_n.dim());
      const auto ends = mesh.local_edge(t, j);
      const PhysicalRule rule = map_to_segment(quad.edge, ends[0], ends[1]);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& p = rule.points[q];
        chi_b.values(p, cb);
        chi_n.values(p, cn);
        double vb = cb.dot(trace_diff[e]);
        double vn = cn.dot(flux_diff[e]);
        if (!projected) {
          vb -= ex.u(p);
          vn -= problem.flux(p, n, ex.u(p), ex.grad(p));
        }
        sb += rule.weights[q] * vb * vb;
        sn += rule.weights[q] * vn * vn;
      }
    }
    tb[t] = mesh.diameter(t) * sb;
    tn[t] = mesh.diameter(t) * sn;
  }
  ErrorNorms out;
  out.e0 = std::sqrt(pairwise_sum(l2));
  out.grad_e0 = std::sqrt(pairwise_sum(h1));
  out.eb = std::sqrt(pairwise_sum(tb));
  out.en = std::sqrt(pairwise_sum(tn));
  return out;
}

Eigen::VectorXd conservation_residual(const WgSpace& space, const ProblemSpec& problem, const Eigen::VectorXd& x,
                                      const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  const int nn = space.dofs_un();
  VectorXd r(mesh.num_triangles());
  VectorXd cv(nn);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double outflow = 0.0;
    for (int j = 0; j < 3; ++j) {
      const EdgeRef ref = mesh.tri_edges(t)[j];
      const EdgeBasis chi = space.flux_basis(ref.edge);
      const VectorXd c = x.segment(space.un_offset(ref.edge), nn);
      const auto ends = mesh.local_edge(t, j);
      const PhysicalRule rule = map_to_segment(quad.edge, ends[0], ends[1]);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        chi.values(rule.points[q], cv);
        outflow += rule.weights[q] * ref.sign * cv.dot(c);
      }
    }
    const PhysicalRule cell = cell_rule(mesh, t, quad);
    double source = 0.0;
    for (std::size_t q = 0; q < cell.size(); ++q) source += cell.weights[q] * problem.load(cell.points[q]);
    r[t] = std::abs(-outflow - source);
  }
  return r;
}

double flux_jump(const WgSpace& space, const Eigen::VectorXd& x, const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  const int nn = space.dofs_un();
  VectorXd cv(nn);
  double worst = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary(e)) continue;
    int signs[2] = {0, 0};
    for (int side = 0; side < 2; ++side) {
      const int t = mesh.edge_triangles(e)[side];
      for (const EdgeRef& ref : mesh.tri_edges(t))
        if (ref.edge == e) signs[side] = ref.sign;
    }
    const EdgeBasis chi = space.flux_basis(e);
    const VectorXd c = x.segment(space.un_offset(e), nn);
    const auto& [a, b] = mesh.edge(e);
    const PhysicalRule rule = map_to_segment(quad.edge, mesh.point(a), mesh.point(b));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      chi.values(rule.points[q], cv);
      const double value = cv.dot(c);
      worst = std::max(worst, std::abs(signs[0] * value + signs[1] * value));
    }
  }
  return worst;
}

double load_norm(const WgSpace& space, const ProblemSpec& problem, const QuadratureSet& quad) {
  const Mesh& mesh = space.mesh();
  std::vector<double> parts(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const PhysicalRule cell = cell_rule(mesh, t, quad);
    double s = 0.0;
    for (std::size_t q = 0; q < cell.size(); ++q) {
      const double f = problem.load(cell.points[q]);
      s += cell.weights[q] * f * f;
    }
    parts[t] = s;
  }
  return std::sqrt(pairwise_sum(parts));
}

DiscreteSeminorms discrete_seminorms(const WgSpace& space, const GlobalBlocks& blocks, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& qh) {
  const int nu = space.num_u();
  const int nl = space.num_lambda();
  PDWG_REQUIRE(x.size() == nu + nl, Error, "solution vector does not match the space");
  VectorXd e = x.head(nu);
  if (qh.size() > 0) e -= qh.head(nu);
  const VectorXd lambda = x.tail(nl);
  DiscreteSeminorms out;
  out.energy_u = std::sqrt(std::max(0.0, e.dot(blocks.S * e)));
  out.energy_lambda = std::sqrt(std::max(0.0, lambda.dot(blocks.C * lambda)));
  return out;
}

std::optional<double> observed_rate(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
  return std::log2(coarse / fine);
}

void compute_rates(ErrorReport& report) {
  report.rates.assign(report.levels.size(), LevelRates{});
  for (std::size_t i = 1; i < report.levels.size(); ++i) {
    const ErrorNorms& c = report.levels[i - 1].norms;
    const ErrorNorms& f = report.levels[i].norms;
    report.rates[i] = {observed_rate(c.e0, f.e0), observed_rate(c.grad_e0, f.grad_e0), observed_rate(c.eb, f.eb),
                       observed_rate(c.en, f.en)};
  }
}

Raster sample_field(const WgSpace& space, const Eigen::VectorXd& x, int nx, int ny) {
  PDWG_REQUIRE(nx >= 2 && ny >= 2, Error, "raster needs at least 2x2 nodes");
  const Mesh& mesh = space.mesh();
  Point lo = mesh.point(0), hi = mesh.point(0);
  for (const Point& p : mesh.points()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 extent = hi - lo;

  // Bin grid for point location.
  const int nbin = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()))));
  std::vector<std::vector<int>> bins(static_cast<std::size_t>(nbin) * nbin);
  const auto bin_of = [&](double v, double l, double ext) {
    return std::clamp(static_cast<int>((v - l) / ext * nbin), 0, nbin - 1);
  };
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto v = mesh.vertices(t);
    const Point tl = v[0].cwiseMin(v[1]).cwiseMin(v[2]);
    const Point th = v[0].cwiseMax(v[1]).cwiseMax(v[2]);
    for (int j = bin_of(tl.y(), lo.y(), extent.y()); j <= bin_of(th.y(), lo.y(), extent.y()); ++j)
      for (int i = bin_of(tl.x(), lo.x(), extent.x()); i <= bin_of(th.x(), lo.x(), extent.x()); ++i)
        bins[static_cast<std::size_t>(j) * nbin + i].push_back(t);
  }

  const double tol = 1e-12;
  const auto locate = [&](const Point& p) {
    const auto& cand = bins[static_cast<std::size_t>(bin_of(p.y(), lo.y(), extent.y())) * nbin +
                            bin_of(p.x(), lo.x(), extent.x())];
    for (int t : cand) {
      const auto v = mesh.vertices(t);
      const double twice_area = 2.0 * mesh.area(t);
      const auto cross = [](const Point& a, const Point& b, const Point& c) {
        return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
      };
      if (cross(v[0], v[1], p) >= -tol * twice_area && cross(v[1], v[2], p) >= -tol * twice_area &&
          cross(v[2], v[0], p) >= -tol * twice_area)
        return t;
    }
    return -1;
  };

  Raster r;
  r.nx = nx;
  r.ny = ny;
  const std::size_t total = static_cast<std::size_t>(nx) * ny;
  r.x.resize(total);
  r.y.resize(total);
  r.u.resize(total);
  r.inside.resize(total);
  VectorXd fv(space.dofs_u0());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
      const Point p(lo.x() + extent.x() * i / (nx - 1), lo.y() + extent.y() * j / (ny - 1));
      r.x[idx] = p.x();
      r.y[idx] = p.y();
      const int t = locate(p);
      if (t < 0) {
        r.u[idx] = std::numeric_limits<double>::quiet_NaN();
        r.inside[idx] = 0;
        continue;
      }
      const TriBasis phi = space.element_basis(t);
      phi.values(p, fv);
      r.u[idx] = fv.dot(x.segment(space.u0_offset(t), fv.size()));
      r.inside[idx] = 1;
    }
  }
  return r;
}

void write_raster_csv(std::ostream& os, const Raster& raster) {
  os << "x,y,u\n";
  for (std::size_t i = 0; i < raster.u.size(); ++i) {
    os << fmt("%.10g", raster.x[i]) << ',' << fmt("%.10g", raster.y[i]) << ','
       << (raster.inside[i] ? fmt("%.10g", raster.u[i]) : std::string("nan")) << '\n';
  }
}

void write_study_csv(std::ostream& os, const StudyLabels& labels, const ErrorReport& report) {
  os << "example,k,l,tau1,tau2,inv_h,e0,rate_e0,grad_e0,rate_grad,eb,rate_eb,en,rate_en,cons_resid\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelErrors& lv = report.levels[i];
    const LevelRates rt = i < report.rates.size() ? report.rates[i] : LevelRates{};
    os << labels.example << ',' << labels.k << ',' << labels.l << ',' << fmt("%g", labels.tau1) << ','
       << fmt("%g", labels.tau2) << ',' << lv.inv_h << ',' << fmt("%.6e", lv.norms.e0) << ','
       << fmt_rate(rt.e0, "%.4f") << ',' << fmt("%.6e", lv.norms.grad_e0) << ',' << fmt_rate(rt.grad_e0, "%.4f")
       << ',' << fmt("%.6e", lv.norms.eb) << ',' << fmt_rate(rt.eb, "%.4f") << ',' << fmt("%.6e", lv.norms.en)
       << ',' << fmt_rate(rt.en, "%.4f") << ',' << fmt("%.3e", lv.max_conservation) << '\n';
  }
}

void write_markdown_table(std::ostream& os, const StudyLabels& labels, const ErrorReport& report) {
  os << "### " << labels.example << ", k=" << labels.k << ", l=" << labels.l << ", tau1=" << fmt("%g", labels.tau1)
     << ", tau2=" << fmt("%g", labels.tau2) << "\n\n";
  os << "| 1/h | ‖e_b‖ | rate | ‖e_n‖ | rate | ‖∇e_0‖ | rate | ‖e_0‖ | rate | max cons. |\n";
  os << "|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelErrors& lv = report.levels[i];
    const LevelRates rt = i < report.rates.size() ? report.rates[i] : LevelRates{};
    const auto rate = [](const std::optional<double>& r) { return r ? fmt("%.2f", *r) : std::string("n/a"); };
    os << "| " << lv.inv_h << " | " << fmt("%.2e", lv.norms.eb) << " | " << (i == 0 ? "" : rate(rt.eb)) << " | "
       << fmt("%.2e", lv.norms.en) << " | " << (i == 0 ? "" : rate(rt.en)) << " | " << fmt("%.2e", lv.norms.grad_e0)
       << " | " << (i == 0 ? "" : rate(rt.grad_e0)) << " | " << fmt("%.2e", lv.norms.e0) << " | "
       << (i == 0 ? "" : rate(rt.e0)) << " | " << fmt("%.1e", lv.max_conservation) << " |\n";
  }
}

}  // namespace pdwg
