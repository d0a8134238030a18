#include "pdwg/cli.hpp"

#include <pdwg/sparse.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace pdwg::cli {

namespace {

enum ExitCode { kOk = 0, kFailed = 1, kUsage = 2, kSolverFailure = 3 };

struct RawOptions {
  std::vector<std::string> levels;
  std::string solver = "direct";
  std::string reference = "projection";
};

void finish_config(StudyConfig& config, const RawOptions& raw) {
  std::string joined;
  for (const auto& item : raw.levels) joined += (joined.empty() ? "" : ",") + item;
  config.levels = parse_levels(joined);
  try {
    config.solver.method = parse_solver_method(raw.solver);
    config.reference = parse_error_reference(raw.reference);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  validate(config);
}

void print_norms(std::ostream& os, const LevelRun& run) {
  const ErrorNorms& n = run.errors.norms;
  char buf[256];
  std::snprintf(buf, sizeof buf, "e0 %.4e  grad_e0 %.4e  eb %.4e  en %.4e\n", n.e0, n.grad_e0, n.eb, n.en);
  os << buf;
}

void print_run(std::ostream& os, const LevelRun& run, bool has_exact) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "1/h=%d unknowns=%d solver=%s backend=%s iterations=%d residual=%.3e\n"
                "conservation %.3e  flux jump %.3e  energy_u %.4e  energy_lambda %.4e\n",
                run.inv_h, run.unknowns, run.solve.method.c_str(), run.solve.backend.c_str(), run.solve.iterations,
                run.solve.relative_residual, run.errors.max_conservation, run.errors.max_flux_jump,
                run.errors.energy_u, run.errors.energy_lambda);
  os << buf;
  if (has_exact) print_norms(os, run);
}

int cmd_solve(const StudyConfig& config) {
  const ProblemSpec problem = make_problem(config);
  if (!problem.note.empty()) std::cout << "note: " << problem.note << '\n';
  const LevelRun run = run_level(config, problem, config.levels.back());
  print_run(std::cout, run, problem.exact.has_value());
  std::filesystem::create_directories(config.out);
  const auto path = config.out / "raster.csv";
  std::ofstream os(path, std::ios::binary);
  write_raster_csv(os, sample_field(*run.space, run.x, config.raster, config.raster));
  std::cout << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_study(const StudyConfig& config) {
  const StudyResult result = run_study(config, std::cout);
  if (result.has_exact) {
    write_markdown_table(std::cout, study_labels(config, make_problem(config)), result.report);
  }
  for (const auto& p : result.written) std::cout << "wrote " << p.string() << '\n';
  if (!result.failure.empty()) {
    std::cerr << "error: " << result.failure << '\n';
    return kSolverFailure;
  }
  return kOk;
}

int cmd_dump(const StudyConfig& config) {
  const ProblemSpec problem = make_problem(config);
  const auto mesh = level_mesh(problem, config.levels.back());
  const auto space = build_space(mesh, config.k, resolve_l(config.k, config.l), resolve_tau(config));
  const QuadratureSet quad = QuadratureSet::for_degree(config.k, config.quad_degree > 0 ? config.quad_degree : -1);
  const SaddleSystem system = assemble(*space, problem, quad);
  std::filesystem::create_directories(config.out);
  const auto mpath = config.out / "matrix.mtx";
  const auto rpath = config.out / "rhs.mtx";
  {
    std::ofstream os(mpath, std::ios::binary);
    write_matrix_market(os, system.matrix);
  }
  {
    std::ofstream os(rpath, std::ios::binary);
    write_matrix_market(os, system.rhs);
  }
  std::cout << system.size() << " unknowns (" << system.num_free_primal << " primal), asymmetry "
            << asymmetry(system.matrix) << "\nwrote " << mpath.string() << "\nwrote " << rpath.string() << '\n';
  return kOk;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"Primal-dual weak Galerkin solver for convection-diffusion problems", "pdwg"};
  app.set_config("--config", "", "Read key=value settings from a file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  StudyConfig config;
  RawOptions raw;
  double tau1 = -1.0, tau2 = -1.0;
  std::string out = config.out.string();

  app.add_option("--example", config.example, "ex1..ex5, patch1 or patch2")->capture_default_str();
  app.add_option("--k", config.k, "Polynomial degree of u0, ub and lambda")->capture_default_str();
  app.add_option("--l", config.l, "Degree of un: k, k-1 or an integer")->capture_default_str();
  auto* t1 = app.add_option("--tau1", tau1, "Gradient weight of the multiplier stabilizer");
  auto* t2 = app.add_option("--tau2", tau2, "Hessian weight of the multiplier stabilizer");
  app.add_option("--levels", raw.levels, "Mesh levels: 1/h values, ranges a..b, or refinement counts rN");
  app.add_option("--domain", config.domain, "square or lshape")->capture_default_str();
  app.add_option("--quad-degree", config.quad_degree, "Quadrature exactness (default 2k+4)");
  app.add_option("--solver", raw.solver, "direct or minres")->capture_default_str();
  app.add_option("--tol", config.solver.tol, "Relative residual tolerance");
  app.add_option("--max-iter", config.solver.max_iter, "MINRES iteration limit")->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--eps", config.epsilon, "Diffusion magnitude of ex3")->capture_default_str();
  app.add_option("--load", config.load, "Constant load of ex4 and ex5 (0 or 1)")->capture_default_str();
  app.add_option("--raster", config.raster, "Raster resolution per direction")->capture_default_str();
  app.add_option("--error-reference", raw.reference, "projection or exact")->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve", "Solve on the finest listed level and write raster.csv");
  auto* study_cmd = app.add_subcommand("study", "Run a refinement ladder and write study.md and study.csv");
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in property suite");
  auto* dump_cmd = app.add_subcommand("dump-matrix", "Write the assembled system in MatrixMarket format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (t1->count() > 0) config.tau1 = tau1;
    if (t2->count() > 0) config.tau2 = tau2;
    config.out = out;
    if (verify_cmd->parsed()) {
      resolve_l(config.k, config.l);
      return run_verify(config, std::cout) == 0 ? kOk : kFailed;
    }
    finish_config(config, raw);
    if (solve_cmd->parsed()) return cmd_solve(config);
    if (study_cmd->parsed()) return cmd_study(config);
    if (dump_cmd->parsed()) return cmd_dump(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const SingularSystemError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const NotConvergedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kFailed;
}

}  // namespace pdwg::cli
