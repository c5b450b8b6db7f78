#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "gamma_qm/cli.hpp"

namespace gqm::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("gamma_qm_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string("\"") + GAMMA_QM_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

RunConfig config(Command c, const fs::path& out) {
  RunConfig r;
  r.command = c;
  r.out = out.string();
  return r;
}

TEST(Validate, FillsCommandDefaults) {
  const auto w = validate(config(Command::well1d, "x"));
  EXPECT_EQ(w.gammas, (std::vector<double>{-0.5, 0.0, 0.5}));
  EXPECT_EQ(w.grid, 4000u);
  EXPECT_EQ(validate(config(Command::well2d, "x")).gammas, std::vector<double>{1.0});
  EXPECT_EQ(validate(config(Command::barrier, "x")).grid, 400u);
}

TEST(Validate, RejectsSingularGammaWithHint) {
  auto c = config(Command::well1d, "x");
  c.gammas = {-2.0};
  try {
    validate(c);
    FAIL() << "accepted gamma = -2";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("singular point"), std::string::npos) << msg;
    EXPECT_NE(msg.find("gamma > -1"), std::string::npos) << msg;
  }
}

TEST(Validate, RejectsCoarseGridAndBadValues) {
  auto c = config(Command::well1d, "x");
  c.grid = 100;
  EXPECT_THROW(validate(c), ConfigError);
  c = config(Command::barrier, "x");
  c.V0 = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = config(Command::evolve, "x");
  c.x0 = 50.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = config(Command::verify, "x");
  c.inject_fault = "bogus";
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Run, BarrierFilesAreDeterministicAndNameDefaults) {
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  std::ostringstream log;
  auto c1 = config(Command::barrier, d1);
  c1.svg = true;
  auto c2 = c1;
  c2.out = d2.string();
  const auto r1 = run(c1, log);
  const auto r2 = run(c2, log);
  ASSERT_EQ(r1.files.size(), r2.files.size());
  ASSERT_GE(r1.files.size(), 5u);
  for (std::size_t i = 0; i < r1.files.size(); ++i) {
    EXPECT_EQ(r1.files[i].filename(), r2.files[i].filename());
    EXPECT_EQ(slurp(r1.files[i]), slurp(r2.files[i])) << r1.files[i];
  }
  const auto csv = slurp(d1 / "barrier_transmission.csv");
  EXPECT_NE(csv.find("# a = 1 (default)\n"), std::string::npos);
  EXPECT_NE(csv.find("# V0 = 18 (default)\n"), std::string::npos);
  EXPECT_NE(csv.find("\nE_over_V0,T_closed_g-0.5,"), std::string::npos);
  EXPECT_NE(csv.find("1.0000000000000000e-02,"), std::string::npos);
  const auto svg = slurp(d1 / "barrier_transmission.svg");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
}

TEST(Run, FreeFluxAndWell2dSummary) {
  const auto d = scratch("free");
  std::ostringstream log;
  run(config(Command::free, d), log);
  EXPECT_NE(log.str().find("free: max |J - hbar k/m|"), std::string::npos);
  run(config(Command::well2d, d), log);
  const auto s = slurp(d / "well2d_summary.csv");
  EXPECT_NE(s.find("gamma,nx,ny,total_probability,argmax_x,argmax_y,cell_spread"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "well2d_g1_n20_20.csv"));
}

TEST(Binary, ExitCodes) {
  const auto d = scratch("exit");
  EXPECT_EQ(run_binary("--help"), 0);
  EXPECT_EQ(run_binary("verify --quick"), 0);
  EXPECT_EQ(run_binary("verify --quick --inject-fault normalization"), 1);
  EXPECT_EQ(run_binary("well1d --gamma -2 --out " + d.string()), 2);
  EXPECT_EQ(run_binary("barrier --no-such-flag"), 2);
  EXPECT_EQ(run_binary("teleport"), 2);
  EXPECT_EQ(run_binary("barrier --config " + (d / "missing.toml").string()), 2);
}

TEST(Binary, ConfigPrecedence) {
  const auto d = scratch("config");
  const auto toml = d / "run.toml";
  std::ofstream(toml) << "# barrier settings\nV0 = 10\na = 2\ngamma = [0.25, -0.25]\ngrid = 40\n";
  ASSERT_EQ(run_binary("barrier --config " + toml.string() + " --a 0.5 --out " + d.string()), 0);
  const auto csv = slurp(d / "barrier_transmission.csv");
  EXPECT_NE(csv.find("# V0 = 10\n"), std::string::npos);
  EXPECT_NE(csv.find("# a = 0.5\n"), std::string::npos);
  EXPECT_NE(csv.find("# gamma = 0.25 -0.25\n"), std::string::npos);
  EXPECT_NE(csv.find("# mass = 1 (default)\n"), std::string::npos);

  std::ofstream(toml) << "V0 = 10\nunknown_key = 3\n";
  EXPECT_EQ(run_binary("barrier --config " + toml.string() + " --out " + d.string()), 2);
  std::ofstream(toml) << "V0 = not-a-number\n";
  EXPECT_EQ(run_binary("barrier --config " + toml.string() + " --out " + d.string()), 2);
}

}  // namespace
}  // namespace gqm::cli
