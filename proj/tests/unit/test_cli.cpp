#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "gpe2d/commands.hpp"
#include "gpe2d/errors.hpp"
#include "gpe2d/io.hpp"
#include "gpe2d/run_config.hpp"

using namespace gpe2d;
using namespace gpe2d::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gpe2d_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(GPE2D_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallGrid = "[output]\ngrid_nx = 21\ngrid_ny = 17\n";

}  // namespace

TEST(Cli, ConfigRoundTripIsLossless) {
  RunConfig c;
  c.system.theta = {{{400.0, 1.0 / 3.0}, {1.0 / 3.0, 150.0}}};
  c.system.centers = {{{-4.5, 0.25}, {4.5, 0.0}}};
  c.system.m = {1.0, 2.0};
  c.system.N = {1.0, 0.1};
  c.system.rho = 0.5;
  c.basis_x = {32, 0.9};
  c.basis_y = {20, 1.1};
  c.solver.grad_tol = 1e-9;
  c.solver.continuation_steps_theta = 7;
  c.excited = {{{{2, 1}, {0, 3}}}, false};
  c.kappas = {1.0, 10.0, 1200.0};
  c.sweep.points_per_decade = 3;
  c.grid = {-5.0, 5.0, 11, -4.0, 4.0, 9};
  c.out_dir = "some/dir";
  std::istringstream in(write_run_config(c));
  EXPECT_EQ(parse_run_config(in), c);
}

TEST(Cli, ConfigRejectsUnknownAndMalformedInput) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_run_config(in);
  };
  EXPECT_THROW(parse("[system]\nfoo = 1\n"), InvalidParameter);
  EXPECT_THROW(parse("[nowhere]\n"), InvalidParameter);
  EXPECT_THROW(parse("[system]\ntheta11 = 1\ntheta11 = 2\n"), InvalidParameter);
  EXPECT_THROW(parse("[system]\ntheta11 1\n"), ParseError);
  EXPECT_THROW(parse("[system\n"), ParseError);
  EXPECT_THROW(parse("[system]\ntheta11 = abc\n"), InvalidParameter);
  EXPECT_THROW(parse("[system]\nN1 = -1\n"), InvalidParameter);
  const auto c = parse("# comment\n[system]\ntheta12 = 3 # trailing\n[sweep]\nkappas = 1, 2,3\n");
  EXPECT_EQ(c.system.theta[1][0], 3.0);
  EXPECT_EQ(c.kappas, (std::vector<double>{1.0, 2.0, 3.0}));
  try {
    parse("[system]\nN2 = -1\n");
  } catch (const InvalidParameter& e) {
    EXPECT_EQ(e.key(), "N2");
  }
}

TEST(Cli, DoubleLists) {
  EXPECT_EQ(parse_double_list("1,2.5, 3e2", "k"), (std::vector<double>{1.0, 2.5, 300.0}));
  EXPECT_TRUE(parse_double_list("", "k").empty());
  EXPECT_THROW(parse_double_list("1,,2", "k"), InvalidParameter);
  EXPECT_THROW(parse_double_list("1,x", "k"), InvalidParameter);
}

TEST(Cli, SolveLinearWritesReadableArtifacts) {
  const auto dir = scratch("solve");
  const auto cfg = write_config(dir, std::string(kSmallGrid));
  Invocation inv{"solve", cfg, dir / "out", {}, {}};
  ASSERT_EQ(run(inv), kOk);
  std::ifstream js(dir / "out" / "report.json");
  std::stringstream text;
  text << js.rdbuf();
  const auto rep = io::report_from_json(text.str());
  EXPECT_NEAR(rep.energies_per_component[0], 1.0, 1e-10);
  EXPECT_NEAR(rep.energies_per_component[1], 1.0, 1e-10);
  EXPECT_TRUE(rep.converged);
  const auto f = io::read_coefficients(dir / "out" / "phi1.coeffs");
  EXPECT_NEAR(f.mass(), 1.0, 1e-12);
  const auto g = io::read_grid(dir / "out" / "phi2.grid");
  EXPECT_EQ(g.grid.nx, 21);
  EXPECT_EQ(g.grid.ny, 17);
  EXPECT_EQ(g.component, 2);
  EXPECT_NEAR(g.values(8, 10), 1.0 / std::sqrt(M_PI), 1e-12);
  // The threaded export must match the serial synthesis.
  EXPECT_TRUE(g.values == synthesize_on_grid(io::read_coefficients(dir / "out" / "phi2.coeffs"), g.grid));
}

TEST(Cli, ThreadCapFromEnvironment) {
  ::setenv("GPE2D_THREADS", "3", 1);
  EXPECT_EQ(export_threads(), 3u);
  ::setenv("GPE2D_THREADS", "0", 1);
  EXPECT_GE(export_threads(), 1u);
  ::setenv("GPE2D_THREADS", "x", 1);
  EXPECT_THROW(export_threads(), InvalidParameter);
  ::unsetenv("GPE2D_THREADS");
}

TEST(Cli, TfReportsDecoupledIdentity) {
  const auto dir = scratch("tf");
  const auto cfg = write_config(dir, std::string("[system]\ntheta11 = 400\ntheta22 = 200\nx11 = 1\n") + kSmallGrid);
  Invocation inv{"tf", cfg, dir / "out", {}, {}};
  ASSERT_EQ(run(inv), kOk);
  std::ifstream in(dir / "out" / "tf_report.txt");
  std::string line, r, R;
  while (std::getline(in, line)) {
    if (line.rfind("r = ", 0) == 0) r = line.substr(4);
    if (line.rfind("R = ", 0) == 0) R = line.substr(4);
  }
  EXPECT_FALSE(r.empty());
  EXPECT_EQ(r, R);
  EXPECT_NO_THROW(io::read_grid(dir / "out" / "tf1.grid"));
}

TEST(Cli, TfFullOverlapForConcentricTraps) {
  const auto dir = scratch("tf3");
  const auto cfg = write_config(dir, std::string("[system]\ntheta11 = 400\ntheta22 = 200\ntheta12 = 100\n") + kSmallGrid);
  ASSERT_EQ(run({"tf", cfg, dir / "out", {}, {}}), kOk);
  std::ifstream in(dir / "out" / "tf_report.txt");
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_NE(s.str().find("class = FullOverlap"), std::string::npos);
}

TEST(Cli, SweepOnLinearBase) {
  const auto dir = scratch("sweep");
  const auto cfg = write_config(dir, std::string("[basis]\nL1 = 10\nL2 = 10\n") + kSmallGrid);
  Invocation inv{"sweep", cfg, dir / "out", std::string("1,10,100"), {}};
  ASSERT_EQ(run(inv), kOk);
  std::ifstream in(dir / "out" / "sweep.csv");
  const auto r = read_sweep_csv(in);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_LE(r[0].energy, r[1].energy + 1e-7);
  EXPECT_LE(r[1].energy, r[2].energy + 1e-7);
  EXPECT_NO_THROW(io::read_coefficients(dir / "out" / "sweep_last_phi1.coeffs"));
}

TEST(Cli, ExcitedWritesCollapseFlag) {
  const auto dir = scratch("excited");
  const auto cfg = write_config(dir, std::string("[basis]\nL1 = 8\nL2 = 8\n") + kSmallGrid);
  Invocation inv{"excited", cfg, dir / "out", {}, std::string("0,1")};
  ASSERT_EQ(run(inv), kOk);
  std::ifstream in(dir / "out" / "excited.json");
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_NE(s.str().find("\"collapsed_to_ground\": false"), std::string::npos);
  EXPECT_NE(s.str().find("\"ground_energy\": 2.0"), std::string::npos);
}

TEST(Cli, ExitCodesFromTheBinary) {
  const auto dir = scratch("exit");
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(run_binary("quadcheck" + out), kOk);
  EXPECT_EQ(run_binary("solve --config " + write_config(dir, std::string(kSmallGrid)).string() + out), kOk);
  EXPECT_EQ(run_binary("solve --config " + write_config(dir, "[system]\nN1 = -1\n").string() + out), kConfigError);
  EXPECT_EQ(run_binary("solve --config " + (dir / "missing.cfg").string() + out), kConfigError);
  EXPECT_EQ(run_binary("solve --config " + write_config(dir, "[system]\nbogus = 1\n").string() + out), kConfigError);
  EXPECT_EQ(run_binary("tf --config " +
                       write_config(dir, "[system]\ntheta11 = 4\ntheta22 = 1\ntheta12 = 2\n").string() + out),
            kSingularCoupling);
  EXPECT_EQ(run_binary("sweep --kappas \"\"" + out), kConfigError);
  EXPECT_EQ(run_binary("sweep --kappas 3,1" + out), kConfigError);
  EXPECT_EQ(run_binary("excited --modes 1,2,3" + out), kConfigError);
  EXPECT_EQ(run_binary("frobnicate"), kConfigError);
  EXPECT_EQ(run_binary("solve --config " +
                       write_config(dir, "[system]\ntheta11 = 100\n[solver]\nmax_newton_iters = 2\n"
                                         "continuation_steps_theta = 1\n[output]\ngrid_nx = 5\ngrid_ny = 5\n")
                           .string() +
                       out),
            kNonConvergence);
}

TEST(Cli, ShippedConfigsParse) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(GPE2D_CONFIG_DIR)) {
    if (e.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW(load_run_config(e.path()).validate()) << e.path();
    ++n;
  }
  EXPECT_GE(n, 5);
}
