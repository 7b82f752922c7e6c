#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <gaah/io.hpp>

#include "config.hpp"
#include "manifest.hpp"
#include "plotdata.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using namespace gaah::cli;

namespace {

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("gaah_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path root_;
};

}  // namespace

TEST_F(CliRun, EvolveDecoupledIsStationary) {
  RunConfig c = parse_config_text("model.Delta = 2.5\nbath.eta = 0\ngrid.t_max = 20\ngrid.dt = 0.01");
  ASSERT_EQ(run(Command::Evolve, c, root_), exit_code::ok);
  std::ifstream in(root_ / "trajectory.csv");
  const auto file = gaah::io::read_trajectory_csv(in);
  for (double sp : file.trajectory.sp) ASSERT_NEAR(sp, 1.0, 1e-8);
  EXPECT_TRUE(fs::exists(root_ / "manifest.json"));
  EXPECT_FALSE(fs::exists(root_ / "error.json"));
}

TEST_F(CliRun, PolesRecordContainsReferenceValue) {
  RunConfig c = parse_config_text("model.Delta = 2.5");
  ASSERT_EQ(run(Command::Poles, c, root_), exit_code::ok);
  const std::string text = slurp(root_ / "poles.csv");
  EXPECT_NE(text.find("\n1,2.95223"), std::string::npos) << text;
  EXPECT_NE(text.find(",-5.0622"), std::string::npos) << text;
  EXPECT_TRUE(fs::exists(root_ / "poles_grid.csv"));
}

TEST_F(CliRun, SweepWritesOneFilePerPointAndSummary) {
  RunConfig c = parse_config_text(
      "grid.t_max = 20\ngrid.dt = 0.02\nsweep.param = model.Delta\nsweep.values = 1,2.5,6");
  ASSERT_EQ(run(Command::Sweep, c, root_), exit_code::ok);
  for (const char* v : {"1", "2.5", "6"}) {
    EXPECT_TRUE(fs::exists(root_ / ("evolve_model.Delta=" + std::string(v) + ".csv"))) << v;
  }
  const std::string summary = slurp(root_ / "summary.csv");
  EXPECT_NE(summary.find("value,t_ref,SP_t_ref"), std::string::npos);
  std::size_t rows = 0;
  std::istringstream lines(summary);
  for (std::string line; std::getline(lines, line);) rows += (!line.empty() && line[0] != '#');
  EXPECT_EQ(rows, 4u);  // header + three points
}

TEST_F(CliRun, SweepWithoutValuesIsConfigError) {
  RunConfig c = parse_config_text("sweep.param = model.Delta");
  EXPECT_EQ(run(Command::Sweep, c, root_), exit_code::config);
  EXPECT_NE(slurp(root_ / "error.json").find("sweep.values"), std::string::npos);
}

TEST_F(CliRun, InvalidConfigReportsConfigError) {
  RunConfig c;
  c.model.a = 1.5;
  EXPECT_EQ(run(Command::Evolve, c, root_), exit_code::config);
  const std::string err = slurp(root_ / "error.json");
  EXPECT_NE(err.find("\"kind\": \"config\""), std::string::npos);
  EXPECT_NE(err.find("model"), std::string::npos);
}

TEST_F(CliRun, OracleMismatchIsValidationFailure) {
  RunConfig c = parse_config_text("model.Delta = 2.5\ngrid.dt = 0.05\noracle.modes = 200\noracle.t_max = 2\n"
                                  "oracle.tolerance = 1e-12");
  EXPECT_EQ(run(Command::Oracle, c, root_), exit_code::validation);
  EXPECT_TRUE(fs::exists(root_ / "deviation.csv"));
  EXPECT_TRUE(fs::exists(root_ / "error.json"));
}

TEST_F(CliRun, NumericFailureExitCode) {
  // A far-away explicit region holds no poles and the pole grid cannot be
  // evaluated where the self-energy is undefined.
  RunConfig c = parse_config_text("poles.re_min = 200\npoles.re_max = 210\npoles.im_min = -1\npoles.im_max = 0");
  const int code = run(Command::Poles, c, root_);
  EXPECT_TRUE(code == exit_code::config || code == exit_code::numeric) << code;
  EXPECT_TRUE(fs::exists(root_ / "error.json"));
}

TEST_F(CliRun, IdenticalConfigGivesIdenticalHashes) {
  RunConfig c = parse_config_text("model.Delta = 2.5\ngrid.t_max = 10\ngrid.dt = 0.02");
  ASSERT_EQ(run(Command::Evolve, c, root_ / "a"), exit_code::ok);
  ASSERT_EQ(run(Command::Evolve, c, root_ / "b"), exit_code::ok);
  EXPECT_EQ(sha256_file(root_ / "a" / "trajectory.csv"), sha256_file(root_ / "b" / "trajectory.csv"));
}

TEST_F(CliRun, Fig1BundleLayout) {
  RunConfig c = parse_config_text("grid.t_max = 5\ngrid.dt = 0.05\nfigdata.bundle = fig1");
  ASSERT_EQ(run(Command::Figdata, c, root_), exit_code::ok);
  std::size_t trajectories = 0, panels = 0;
  for (const auto& e : fs::directory_iterator(root_)) {
    const std::string n = e.path().filename().string();
    if (n.rfind("fig1_a0_", 0) == 0) ++trajectories;
    if (n == "fig1_a_SP.csv" || n == "fig1_a_IPR.csv" || n == "fig1_b_SP.csv" || n == "fig1_b_IPR.csv") ++panels;
  }
  EXPECT_EQ(trajectories, 7u);
  EXPECT_EQ(panels, 4u);
  const std::string sp = slurp(root_ / "fig1_b_SP.csv");
  EXPECT_NE(sp.find("t,Delta_3,log10_Delta_3,Delta_4,log10_Delta_4,Delta_6,log10_Delta_6,Delta_10,log10_Delta_10"),
            std::string::npos);
}

TEST_F(CliRun, FigA1HasSignColumns) {
  RunConfig c = parse_config_text("figdata.bundle = figA1\npoles.resolution_re = 64");
  ASSERT_EQ(run(Command::Figdata, c, root_), exit_code::ok);
  const std::string grid = slurp(root_ / "figA1_a_grid.csv");
  EXPECT_NE(grid.find("ReE,ImE,ReDet,ImDet,signRe,signIm"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "figA1_b_zoom2.csv"));
}

TEST(PlotData, EmptyInputWritesNothing) {
  std::stringstream ss;
  EXPECT_THROW(write_panel_csv(ss, Observable::SP, {}, {}), std::invalid_argument);
  EXPECT_TRUE(ss.str().empty());
}

TEST(PlotData, MismatchedGridsRejected) {
  gaah::dynamics::Trajectory a, b;
  a.grid = {0.1, 2};
  a.sp = {1, 1, 1};
  b.grid = {0.1, 3};
  b.sp = {1, 1, 1, 1};
  std::stringstream ss;
  EXPECT_THROW(write_panel_csv(ss, Observable::SP, {{"a", &a}, {"b", &b}}, {}), std::invalid_argument);
}

TEST(Manifest, HashOfKnownContent) {
  const fs::path p = fs::temp_directory_path() / "gaah_hash_probe.txt";
  write_atomic(p, "abc");
  EXPECT_EQ(sha256_file(p), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove(p);
}

TEST(Commands, NamesRoundTrip) {
  for (auto c : {Command::Spectrum, Command::Evolve, Command::Poles, Command::Oracle, Command::Sweep,
                 Command::Figdata}) {
    EXPECT_EQ(parse_command(to_string(c)), c);
  }
  EXPECT_FALSE(parse_command("plot").has_value());
}
