#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

const std::string cli = KEPLER_ARCS_CLI;
const fs::path configs = KEPLER_ARCS_DEMO_CONFIGS;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kepler_arcs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " \"" + cli + "\" " + args + " > \"" + (dir_ / "stdout.txt").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }
  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string out(const std::string& sub) const { return "--out \"" + (dir_ / sub).string() + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("enumerate --no-such-flag"), 2);
  EXPECT_EQ(run("enumerate --jobs 0"), 2);
  EXPECT_EQ(run("enumerate --config \"" + (dir_ / "missing.json").string() + "\""), 2);
  EXPECT_EQ(run("enumerate --config \"" + write("bad.json", "{ nope").string() + "\" " + out("o")), 2);
  EXPECT_EQ(run("enumerate --config \"" + write("schema.json", R"({"schema": "x"})").string() + "\" " + out("o")), 2);
  EXPECT_EQ(run("enumerate --config \"" +
                write("range.json", R"({"schema": "kepler-arcs/config-1", "scenarios": [{"radius": 2, "half_angle": 1}]})")
                    .string() +
                "\" " + out("o")),
            2);
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help"), 0); }

TEST_F(Cli, EnumerateWritesDeterministicOutputs) {
  const std::string cfg = "--config \"" + (configs / "scenarios.json").string() + "\" ";
  ASSERT_EQ(run("enumerate " + cfg + out("a")), 0) << read(dir_ / "stdout.txt");
  ASSERT_EQ(run("enumerate --jobs 3 " + cfg + out("b")), 0);
  const std::string ra = read(dir_ / "a" / "report.json");
  EXPECT_FALSE(ra.empty());
  EXPECT_EQ(ra, read(dir_ / "b" / "report.json"));
  const std::string csv = read(dir_ / "a" / "arcs.csv");
  EXPECT_EQ(csv, read(dir_ / "b" / "arcs.csv"));
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(csv.back(), '\n');
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  const fs::path env_dir = dir_ / "from_env";
  ASSERT_EQ(run("enumerate --config \"" + (configs / "scenarios.json").string() + "\"",
                "KEPLER_ARCS_OUT=\"" + env_dir.string() + "\""),
            0);
  EXPECT_TRUE(fs::exists(env_dir / "report.json"));
  EXPECT_TRUE(fs::exists(env_dir / "arcs.csv"));
}

TEST_F(Cli, ClassifyAndBifurcate) {
  ASSERT_EQ(run("classify --mesh 200 --config \"" + (configs / "scenarios.json").string() + "\" " + out("c")), 0)
      << read(dir_ / "stdout.txt");
  EXPECT_TRUE(fs::exists(dir_ / "c" / "classification.csv"));
  ASSERT_EQ(run("bifurcate --seed 4 --config \"" + (configs / "families.json").string() + "\" " + out("b")), 0)
      << read(dir_ / "stdout.txt");
  EXPECT_TRUE(fs::exists(dir_ / "b" / "bifurcation_members.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "b" / "bifurcation_summary.csv"));
  EXPECT_NE(read(dir_ / "b" / "report.json").find("\"seed\": 4"), std::string::npos);
}

TEST_F(Cli, FigureWritesSvg) {
  ASSERT_EQ(run("figure --config \"" + (configs / "scenarios.json").string() + "\" " + out("f")), 0);
  const std::string svg = read(dir_ / "f" / "scenario_3.svg");
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_NE(svg.find("id=\"panel1\""), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "f" / "scenario_4.svg"));
}

TEST_F(Cli, ImpossibleToleranceIsAScientificFailure) {
  const fs::path cfg = write("strict.json", R"({"schema": "kepler-arcs/config-1",
      "scenarios": [{"radius": 0.3, "half_angle": 1.2}], "mesh": 50, "max_mesh": 50,
      "tolerances": {"location": 1e-30}})");
  EXPECT_EQ(run("classify --config \"" + cfg.string() + "\" " + out("s")), 1) << read(dir_ / "stdout.txt");
  EXPECT_TRUE(fs::exists(dir_ / "s" / "report.json"));
}
