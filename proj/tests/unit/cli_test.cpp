#include <pdwg/cli.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pdwg::cli {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pdwg_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "pdwg");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return run_main(static_cast<int>(argv.size()), argv.data());
}

TEST(Levels, ParsesListsRangesAndRefinementCounts) {
  EXPECT_EQ(parse_levels("4,8,16"), (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(parse_levels("4..32"), (std::vector<int>{4, 8, 16, 32}));
  EXPECT_EQ(parse_levels("r0,r3"), (std::vector<int>{2, 16}));
  EXPECT_EQ(parse_levels(" 2 , 4..8 "), (std::vector<int>{2, 4, 8}));
  EXPECT_TRUE(parse_levels("").empty());
  EXPECT_THROW(parse_levels("4,x"), ConfigError);
  EXPECT_THROW(parse_levels("8..4"), ConfigError);
}

TEST(Levels, RefinementsForPowersOfTwo) {
  EXPECT_EQ(refinements_for(2), 0);
  EXPECT_EQ(refinements_for(4), 1);
  EXPECT_EQ(refinements_for(64), 5);
  EXPECT_THROW(refinements_for(6), ConfigError);
  EXPECT_THROW(refinements_for(1), ConfigError);
  EXPECT_THROW(refinements_for(0), ConfigError);
}

TEST(Config, ResolveL) {
  EXPECT_EQ(resolve_l(2, "k"), 2);
  EXPECT_EQ(resolve_l(2, "k-1"), 1);
  EXPECT_EQ(resolve_l(3, "2"), 2);
  EXPECT_THROW(resolve_l(3, "1"), ConfigError);
  EXPECT_THROW(resolve_l(2, "kk"), ConfigError);
}

TEST(Config, TauDefaultsAndOverrides) {
  StudyConfig c;
  c.k = 1;
  c.l = "k-1";
  EXPECT_EQ(resolve_tau(c).tau1, 1.0);
  c.tau2 = 0.5;
  EXPECT_EQ(resolve_tau(c).tau2, 0.5);
  EXPECT_EQ(resolve_tau(c).tau1, 1.0);
}

TEST(Config, ValidationErrors) {
  StudyConfig c;
  EXPECT_THROW(validate(c), ConfigError);  // empty ladder
  c.levels = {4, 8};
  EXPECT_NO_THROW(validate(c));
  c.levels = {8, 4};
  EXPECT_THROW(validate(c), ConfigError);
  c.levels = {4, 12};
  EXPECT_THROW(validate(c), ConfigError);
  c.levels = {4};
  c.k = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c.k = 1;
  c.tau1 = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c.tau1.reset();
  c.example = "ex9";
  EXPECT_THROW(validate(c), Error);
  c.example = "ex1";
  c.domain = "disk";
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Study, Ex1WritesTablesWithOneRowPerLevel) {
  StudyConfig c;
  c.levels = {2, 4, 8};
  c.out = fresh_dir("ex1");
  std::ostringstream log;
  const StudyResult r = run_study(c, log);
  EXPECT_TRUE(r.failure.empty());
  EXPECT_TRUE(r.has_exact);
  ASSERT_EQ(r.runs.size(), 3u);
  EXPECT_TRUE(fs::exists(c.out / "study.md"));
  EXPECT_FALSE(fs::exists(c.out / "raster.csv"));
  const auto rows = lines_of(c.out / "study.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].rfind("ex1,1,1,0,0,2,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("ex1,1,1,0,0,8,", 0), 0u);
  for (const LevelRun& run : r.runs) {
    EXPECT_GT(run.unknowns, 0);
    EXPECT_LE(run.unknowns, static_cast<int>(run.x.size()));
    EXPECT_LT(run.errors.max_conservation, 1e-8);
  }
}

TEST(Study, OutputsAreDeterministic) {
  StudyConfig c;
  c.example = "ex2";
  c.k = 2;
  c.l = "k-1";
  c.levels = {2, 4, 8};
  c.out = fresh_dir("det_a");
  std::ostringstream log;
  run_study(c, log);
  const std::string a = slurp(c.out / "study.csv");
  c.out = fresh_dir("det_b");
  run_study(c, log);
  EXPECT_EQ(a, slurp(c.out / "study.csv"));
  EXPECT_FALSE(a.empty());
}

TEST(Study, Ex4WritesOnlyARaster) {
  StudyConfig c;
  c.example = "ex4";
  c.levels = {8, 16};
  c.raster = 41;
  c.out = fresh_dir("ex4");
  std::ostringstream log;
  const StudyResult r = run_study(c, log);
  EXPECT_FALSE(r.has_exact);
  EXPECT_FALSE(fs::exists(c.out / "study.csv"));
  const auto rows = lines_of(c.out / "raster.csv");
  ASSERT_EQ(rows.size(), 1u + 41u * 41u);
  EXPECT_EQ(rows[0], "x,y,u");
  // Finite everywhere on the square, and close to the inflow data on y = 1.
  const Raster raster = sample_field(*r.runs.back().space, r.runs.back().x, 41, 41);
  for (std::size_t i = 0; i < raster.u.size(); ++i) {
    ASSERT_TRUE(std::isfinite(raster.u[i]));
    if (raster.y[i] == 1.0 && raster.x[i] > 0.1 && raster.x[i] < 0.9) {
      EXPECT_NEAR(raster.u[i], std::sin(3.0 * raster.x[i]), 0.25);
    }
  }
}

TEST(Study, Ex5LShapeRasterIsFiniteInside) {
  StudyConfig c;
  c.example = "ex5";
  c.domain = "lshape";
  c.levels = {8};
  c.raster = 21;
  c.out = fresh_dir("ex5");
  std::ostringstream log;
  const StudyResult r = run_study(c, log);
  ASSERT_TRUE(r.failure.empty()) << r.failure;
  const Raster raster = sample_field(*r.runs.back().space, r.runs.back().x, 21, 21);
  for (std::size_t i = 0; i < raster.u.size(); ++i) {
    EXPECT_EQ(std::isfinite(raster.u[i]), static_cast<bool>(raster.inside[i]));
  }
}

TEST(Study, SolverFailureKeepsCompletedLevels) {
  StudyConfig c;
  c.levels = {2, 4, 32};
  c.solver.method = SolverMethod::Minres;
  c.solver.max_iter = 60;
  c.solver.tol = 1e-12;
  c.out = fresh_dir("partial");
  std::ostringstream log;
  const StudyResult r = run_study(c, log);
  EXPECT_FALSE(r.failure.empty());
  EXPECT_LT(r.runs.size(), 3u);
  const auto rows = lines_of(c.out / "study.csv");
  EXPECT_EQ(rows.size(), 1u + r.runs.size());
}

TEST(ThreadCap, ReadsEnvironment) {
  ::setenv("PDWG_THREADS", "3", 1);
  EXPECT_EQ(thread_cap(), 3);
  ::setenv("PDWG_THREADS", "zero", 1);
  EXPECT_GE(thread_cap(), 1);
  ::unsetenv("PDWG_THREADS");
  EXPECT_GE(thread_cap(), 1);
}

TEST(Main, ConfigFileWithFlagOverride) {
  const fs::path dir = fresh_dir("main");
  fs::create_directories(dir);
  const fs::path cfg = dir / "run.toml";
  std::ofstream(cfg) << "example=\"ex2\"\nk=2\nlevels=[2,4]\nout=\"" << (dir / "from_file").string() << "\"\n";
  EXPECT_EQ(run_args({"--config", cfg.string(), "--out", (dir / "from_flag").string(), "study"}), 0);
  EXPECT_TRUE(fs::exists(dir / "from_flag" / "study.csv"));
  EXPECT_FALSE(fs::exists(dir / "from_file"));
  const auto rows = lines_of(dir / "from_flag" / "study.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].rfind("ex2,2,2,", 0), 0u);
}

TEST(Main, ExitCodes) {
  const fs::path dir = fresh_dir("codes");
  EXPECT_EQ(run_args({"--levels", "", "--out", dir.string(), "study"}), 2);
  EXPECT_EQ(run_args({"--levels", "6", "--out", dir.string(), "study"}), 2);
  EXPECT_EQ(run_args({"--k", "1", "--l", "k-1", "--tau1", "0", "--tau2", "0", "verify"}), 1);
}

TEST(Verify, ChecksPass) {
  EXPECT_TRUE(check_quadrature().passed);
  EXPECT_TRUE(check_basis_derivatives().passed);
  EXPECT_TRUE(check_commutativity(1).passed);
  EXPECT_TRUE(check_patch(2).passed);
  EXPECT_TRUE(check_uniqueness(2, 1, {0.0, 1.0}).passed);
  StudyConfig c;
  c.example = "ex2";
  EXPECT_TRUE(check_conservation(c, 8).passed);
}

}  // namespace
}  // namespace pdwg::cli
