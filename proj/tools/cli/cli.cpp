#include "pdwg/cli.hpp"

#include <pdwg/basis.hpp>
#include <pdwg/quadrature.hpp>
#include <pdwg/sparse.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace pdwg::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

int parse_int(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

int parse_level_item(std::string_view item) {
  if (!item.empty() && (item.front() == 'r' || item.front() == 'R')) {
    const int r = parse_int(item.substr(1), "refinement count");
    if (r < 0 || r > 20) throw ConfigError("refinement count out of range: " + std::string(item));
    return kCoarseInvH << r;
  }
  return parse_int(item, "level");
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool is_manufactured(const std::string& name) { return manufactured_by_name(name).has_value(); }

DomainKind parse_domain(const std::string& name) {
  if (name == "square") return DomainKind::UnitSquare;
  if (name == "lshape") return DomainKind::LShape;
  throw ConfigError("unknown domain '" + name + "' (expected square or lshape)");
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << content;
  written.push_back(path);
}

}  // namespace

std::vector<int> parse_levels(std::string_view text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) {
      if (comma == text.size()) break;
      throw ConfigError("empty item in level list '" + std::string(text) + "'");
    }
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_level_item(item));
      continue;
    }
    const int lo = parse_level_item(item.substr(0, dots));
    const int hi = parse_level_item(item.substr(dots + 2));
    if (lo <= 0 || hi < lo) throw ConfigError("invalid level range '" + item + "'");
    for (long v = lo; v <= hi; v *= 2) out.push_back(static_cast<int>(v));
  }
  return out;
}

int refinements_for(int inv_h) {
  int r = 0;
  for (long v = kCoarseInvH; v <= inv_h; v *= 2, ++r) {
    if (v == inv_h) return r;
  }
  throw ConfigError("level " + std::to_string(inv_h) + " is not " + std::to_string(kCoarseInvH) +
                    " times a power of two");
}

int resolve_l(int k, std::string_view l) {
  const std::string t = trim(l);
  int v = 0;
  if (t == "k") {
    v = k;
  } else if (t == "k-1") {
    v = k - 1;
  } else {
    v = parse_int(t, "l");
  }
  if (k < 1) throw ConfigError("k must be at least 1");
  if (v != k && v != k - 1) {
    throw ConfigError("l must be k or k-1 (got l=" + std::to_string(v) + " for k=" + std::to_string(k) + ")");
  }
  return v;
}

Tau resolve_tau(const StudyConfig& config) {
  const Tau d = default_tau(config.k, resolve_l(config.k, config.l));
  return Tau{config.tau1.value_or(d.tau1), config.tau2.value_or(d.tau2)};
}

void validate(const StudyConfig& config) {
  if (config.k < 1 || config.k > 6) throw ConfigError("k must be between 1 and 6");
  resolve_l(config.k, config.l);
  const Tau tau = resolve_tau(config);
  if (!(tau.tau1 >= 0.0) || !(tau.tau2 >= 0.0)) throw ConfigError("tau1 and tau2 must be non-negative");
  if (config.levels.empty()) throw ConfigError("levels list is empty");
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    refinements_for(config.levels[i]);
    if (i > 0 && config.levels[i] <= config.levels[i - 1]) throw ConfigError("levels must be strictly increasing");
  }
  if (config.quad_degree > kMaxQuadratureDegree) {
    throw ConfigError("quadrature degree above " + std::to_string(kMaxQuadratureDegree));
  }
  if (config.quad_degree > 0 && config.quad_degree < 2 * config.k) {
    throw ConfigError("quadrature degree must be at least 2k");
  }
  if (config.raster < 2) throw ConfigError("raster resolution must be at least 2");
  if (!(config.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (config.load != 0 && config.load != 1) throw ConfigError("load must be 0 or 1");
  parse_domain(config.domain);
  if (!is_manufactured(config.example)) {
    try {
      parse_example_kind(config.example);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
}

ProblemSpec make_problem(const StudyConfig& config) {
  if (auto p = manufactured_by_name(config.example)) {
    if (parse_domain(config.domain) != DomainKind::UnitSquare) {
      throw ConfigError(config.example + " is defined on the unit square only");
    }
    return *p;
  }
  ExampleId id;
  try {
    id.kind = parse_example_kind(config.example);
    id.epsilon = config.epsilon;
    id.load = config.load;
    id.domain = parse_domain(config.domain);
    return builtin(id);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::shared_ptr<const Mesh> level_mesh(const ProblemSpec& problem, int inv_h) {
  Mesh mesh = tag_boundary(coarse_mesh(problem.domain), problem.classifier);
  for (int r = refinements_for(inv_h); r > 0; --r) mesh = refine_uniform(mesh);
  return std::make_shared<const Mesh>(std::move(mesh));
}

LevelRun run_level(const StudyConfig& config, const ProblemSpec& problem, int inv_h) {
  const auto start = std::chrono::steady_clock::now();
  LevelRun run;
  run.inv_h = inv_h;
  const auto mesh = level_mesh(problem, inv_h);
  run.space = build_space(mesh, config.k, resolve_l(config.k, config.l), resolve_tau(config));
  const QuadratureSet quad = QuadratureSet::for_degree(config.k, config.quad_degree > 0 ? config.quad_degree : -1);
  check_diffusion(problem, *mesh, quad.cell.exact_degree);

  const GlobalBlocks blocks = assemble_blocks(*run.space, problem, quad);
  const SaddleSystem system = assemble(*run.space, problem, quad, blocks);
  run.unknowns = system.size();
  SolveResult solved = solve(system, config.solver);
  run.x = std::move(solved.x);
  run.solve = solved.report;

  LevelErrors& e = run.errors;
  e.inv_h = inv_h;
  e.h = 1.0 / inv_h;
  Eigen::VectorXd qh;
  if (problem.exact) {
    e.norms = error_norms(*run.space, problem, run.x, quad, config.reference);
    qh = project_Qh(*run.space, problem, problem.exact->u, problem.exact->grad, quad);
  }
  const DiscreteSeminorms semi = discrete_seminorms(*run.space, blocks, run.x, qh);
  e.energy_u = semi.energy_u;
  e.energy_lambda = semi.energy_lambda;
  e.max_conservation = conservation_residual(*run.space, problem, run.x, quad).maxCoeff();
  e.max_flux_jump = flux_jump(*run.space, run.x, quad);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

StudyLabels study_labels(const StudyConfig& config, const ProblemSpec& problem) {
  const Tau tau = resolve_tau(config);
  return StudyLabels{problem.name, config.k, resolve_l(config.k, config.l), tau.tau1, tau.tau2};
}

int thread_cap() {
  if (const char* env = std::getenv("PDWG_THREADS")) {
    int v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

StudyResult run_study(const StudyConfig& config, std::ostream& log) {
  validate(config);
  const ProblemSpec problem = make_problem(config);
  if (!problem.note.empty()) log << "note: " << problem.note << '\n';

  const std::size_t n = config.levels.size();
  std::vector<std::optional<LevelRun>> runs(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        runs[i] = run_level(config, problem, config.levels[i]);
        const LevelRun& r = *runs[i];
        const std::lock_guard lock(log_mutex);
        log << "1/h=" << r.inv_h << ": " << r.unknowns << " unknowns, " << r.solve.method << " ("
            << r.solve.backend << "), residual " << sci(r.solve.relative_residual) << ", "
            << sci(r.seconds) << " s\n";
      } catch (const Error& e) {
        errors[i] = e.what();
        const std::lock_guard lock(log_mutex);
        log << "1/h=" << config.levels[i] << ": " << e.what() << '\n';
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(thread_cap())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  StudyResult result;
  result.has_exact = problem.exact.has_value();
  for (std::size_t i = 0; i < n; ++i) {
    if (!runs[i]) {
      result.failure = "level 1/h=" + std::to_string(config.levels[i]) + ": " + errors[i];
      break;
    }
    result.report.levels.push_back(runs[i]->errors);
    result.runs.push_back(std::move(*runs[i]));
  }
  compute_rates(result.report);

  std::filesystem::create_directories(config.out);
  const StudyLabels labels = study_labels(config, problem);
  if (result.has_exact) {
    std::ostringstream md, csv;
    write_markdown_table(md, labels, result.report);
    write_study_csv(csv, labels, result.report);
    write_file(config.out / "study.md", md.str(), result.written);
    write_file(config.out / "study.csv", csv.str(), result.written);
  } else if (!result.runs.empty()) {
    const LevelRun& finest = result.runs.back();
    std::ostringstream raster;
    write_raster_csv(raster, sample_field(*finest.space, finest.x, config.raster, config.raster));
    write_file(config.out / "raster.csv", raster.str(), result.written);
  }
  return result;
}

CheckResult check_quadrature(double tol) {
  CheckResult res{"quadrature exactness", true, {}};
  double worst = 0.0;
  for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
    const SegmentRule seg = edge_quadrature(d);
    const TriangleRule tri = tri_quadrature(d);
    for (int p = 0; p <= seg.exact_degree; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < seg.points.size(); ++q) s += seg.weights[q] * std::pow(seg.points[q], p);
      const double exact = p % 2 == 0 ? 2.0 / (p + 1) : 0.0;
      worst = std::max(worst, std::abs(s - exact) / std::max(1.0, std::abs(exact)));
    }
    for (int a = 0; a <= tri.exact_degree; ++a) {
      for (int b = 0; a + b <= tri.exact_degree; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < tri.points.size(); ++q) {
          s += tri.weights[q] * std::pow(tri.points[q].x(), a) * std::pow(tri.points[q].y(), b);
        }
        const double exact = std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
        worst = std::max(worst, std::abs(s - exact) / exact);
      }
    }
  }
  res.passed = worst <= tol;
  res.detail = "max relative error " + sci(worst) + " up to degree " + std::to_string(kMaxQuadratureDegree);
  return res;
}

CheckResult check_basis_derivatives(double tol) {
  CheckResult res{"basis derivatives", true, {}};
  const TriBasis basis(4, Point(0.3, 0.2), 0.7);
  const int m = basis.dim();
  const double step = 1e-5;
  const Point samples[] = {{0.1, 0.15}, {0.45, 0.05}, {0.2, 0.6}, {-0.3, 0.4}};
  double worst = 0.0;
  Eigen::VectorXd vp(m), vm(m);
  Eigen::MatrixX2d g(m, 2), gp(m, 2), gm(m, 2);
  Eigen::MatrixX3d hs(m, 3);
  for (const Point& x : samples) {
    basis.gradients(x, g);
    basis.hessians(x, hs);
    for (int dir = 0; dir < 2; ++dir) {
      const Point dx = dir == 0 ? Point(step, 0.0) : Point(0.0, step);
      basis.values(x + dx, vp);
      basis.values(x - dx, vm);
      worst = std::max(worst, ((vp - vm) / (2 * step) - g.col(dir)).cwiseAbs().maxCoeff());
      basis.gradients(x + dx, gp);
      basis.gradients(x - dx, gm);
      const Eigen::MatrixX2d fd = (gp - gm) / (2 * step);
      // d/dx of the gradient gives (xx, xy); d/dy gives (xy, yy).
      worst = std::max(worst, (fd.col(0) - hs.col(dir)).cwiseAbs().maxCoeff());
      worst = std::max(worst, (fd.col(1) - hs.col(dir + 1)).cwiseAbs().maxCoeff());
    }
  }
  res.passed = worst <= tol;
  res.detail = "max deviation from central differences " + sci(worst);
  return res;
}

CheckResult check_commutativity(int k, double tol) {
  CheckResult res{"commutativity k=" + std::to_string(k), true, {}};
  const ProblemSpec problem = *manufactured_by_name("patch1");
  const auto space = build_space(level_mesh(problem, kCoarseInvH << 2), k, k, Tau{});
  const QuadratureSet quad = QuadratureSet::for_degree(k);
  double worst = 0.0;
  for (int a = 0; a <= k; ++a) {
    for (int b = 0; a + b <= k; ++b) {
      const ScalarField w = [a, b](const Point& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); };
      const VectorField gw = [a, b](const Point& x) {
        return Vec2(a == 0 ? 0.0 : a * std::pow(x.x(), a - 1) * std::pow(x.y(), b),
                    b == 0 ? 0.0 : b * std::pow(x.x(), a) * std::pow(x.y(), b - 1));
      };
      for (int t = 0; t < space->mesh().num_triangles(); ++t) {
        worst = std::max(worst, commutativity_check(*space, t, w, gw, quad));
      }
    }
  }
  res.passed = worst < tol;
  res.detail = "max residual " + sci(worst) + " over monomials of degree <= " + std::to_string(k);
  return res;
}

CheckResult check_patch(int k, double tol, Tau tau) {
  const std::string name = k == 1 ? "patch1" : "patch2";
  CheckResult res{"patch test k=" + std::to_string(k), false, {}};
  StudyConfig config;
  config.example = name;
  config.k = k;
  config.l = "k";
  config.tau1 = tau.tau1;
  config.tau2 = tau.tau2;
  const ProblemSpec problem = *manufactured_by_name(name);
  try {
    const LevelRun run = run_level(config, problem, kCoarseInvH << 2);
    const QuadratureSet quad = QuadratureSet::for_degree(k);
    const Eigen::VectorXd qh = project_Qh(*run.space, problem, problem.exact->u, problem.exact->grad, quad);
    const int nu = run.space->num_u();
    const double du = (run.x.head(nu) - qh.head(nu)).cwiseAbs().maxCoeff();
    const double dl = run.x.tail(run.space->num_lambda()).cwiseAbs().maxCoeff();
    res.passed = du < tol && dl < tol;
    res.detail = "max |u_h - Q_h u| " + sci(du) + ", max |lambda_h| " + sci(dl);
  } catch (const Error& e) {
    res.detail = e.what();
  }
  return res;
}

CheckResult check_conservation(const StudyConfig& config, int inv_h) {
  CheckResult res{"conservation " + config.example + " k=" + std::to_string(config.k) + " l=" + config.l, false, {}};
  try {
    const ProblemSpec problem = make_problem(config);
    const LevelRun run = run_level(config, problem, inv_h);
    const QuadratureSet quad = QuadratureSet::for_degree(config.k, config.quad_degree > 0 ? config.quad_degree : -1);
    const double fnorm = load_norm(*run.space, problem, quad);
    const double bound = 1e-8 * (1.0 + fnorm);
    res.passed = run.errors.max_conservation <= bound && run.errors.max_flux_jump <= 1e-14;
    res.detail = "max residual " + sci(run.errors.max_conservation) + " (bound " + sci(bound) + "), flux jump " +
                 sci(run.errors.max_flux_jump);
  } catch (const Error& e) {
    res.detail = e.what();
  }
  return res;
}

CheckResult check_uniqueness(int k, int l, Tau tau, double tol) {
  CheckResult res{"uniqueness k=" + std::to_string(k) + " l=" + std::to_string(l) + " tau=(" +
                      std::to_string(tau.tau1).substr(0, 4) + "," + std::to_string(tau.tau2).substr(0, 4) + ")",
                  false,
                  {}};
  ProblemSpec problem = builtin(ExampleId{});
  problem.name = "zero-data";
  problem.load = [](const Point&) { return 0.0; };
  problem.dirichlet = [](const Point&) { return 0.0; };
  problem.neumann = [](const Point&, const Vec2&) { return 0.0; };
  problem.exact.reset();
  StudyConfig config;
  config.k = k;
  config.l = std::to_string(l);
  config.tau1 = tau.tau1;
  config.tau2 = tau.tau2;
  try {
    const LevelRun run = run_level(config, problem, kCoarseInvH << 2);
    const double m = run.x.size() == 0 ? 0.0 : run.x.cwiseAbs().maxCoeff();
    // A zero right-hand side alone cannot expose a singular matrix.
    const SaddleSystem system = assemble(*run.space, problem, QuadratureSet::for_degree(k));
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd b(system.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
    const SolveResult probe = solve_linear(system.matrix, b, SolverOptions{}, system.num_free_primal);
    res.passed = m < tol;
    res.detail = "max |x| " + sci(m) + ", random right-hand side residual " + sci(probe.report.relative_residual);
  } catch (const Error& e) {
    res.detail = e.what();
  }
  return res;
}

int run_verify(const StudyConfig& config, std::ostream& os) {
  std::vector<CheckResult> checks;
  checks.push_back(check_quadrature());
  checks.push_back(check_basis_derivatives());
  for (int k = 1; k <= 2; ++k) checks.push_back(check_commutativity(k));
  for (int k = 1; k <= 2; ++k) checks.push_back(check_patch(k));
  for (const char* ex : {"ex1", "ex2"}) {
    StudyConfig c;
    c.example = ex;
    for (int k = 1; k <= 2; ++k) {
      c.k = k;
      for (const char* l : {"k", "k-1"}) {
        c.l = l;
        checks.push_back(check_conservation(c, 8));
      }
    }
  }

  // Regime guard for the configured discretization.
  const int l = resolve_l(config.k, config.l);
  const Tau tau = resolve_tau(config);
  CheckResult regime = check_uniqueness(config.k, l, tau);
  regime.name = "regime " + regime.name;
  if (!regime_consistent(config.k, l, tau)) {
    regime.passed = false;
    regime.detail += "; tau does not activate the term required for this (k, l)";
  }
  checks.push_back(regime);

  int failures = 0;
  for (const CheckResult& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    failures += c.passed ? 0 : 1;
  }
  os << (failures == 0 ? "all properties pass" : std::to_string(failures) + " properties failed") << '\n';
  return failures;
}

}  // namespace pdwg::cli
