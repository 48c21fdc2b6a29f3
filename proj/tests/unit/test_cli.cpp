#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "cafewall/io.hpp"

#ifndef CAFEWALL_CLI_PATH
#error "CAFEWALL_CLI_PATH must name the cafewall executable"
#endif

using namespace cafewall;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string("\"") + CAFEWALL_CLI_PATH + "\" " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cafewall_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  [[nodiscard]] std::string p(const std::string& name) const { return "\"" + (dir_ / name).string() + "\""; }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpListsSubcommands) {
  const Result r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* s : {"generate", "edgemap", "analyze", "experiment", "render"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST_F(Cli, GenerateWritesStimulus) {
  const Result r = run("generate --rows 3 --cols 4 --tile 40 --mortar 2 --out " + p("w.png"));
  ASSERT_EQ(r.code, 0) << r.out;
  const GrayImage g = read_gray_png(dir_ / "w.png");
  EXPECT_EQ(g.width(), 160);
  EXPECT_EQ(g.height(), 124);
}

TEST_F(Cli, InvalidParametersExitTwo) {
  Result r = run("generate --rows 0 --out " + p("w.png"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("rows"), std::string::npos);
  r = run("experiment --name nope");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("falling-rising"), std::string::npos);
  ASSERT_EQ(run("generate --rows 3 --cols 4 --tile 40 --mortar 2 --out " + p("w.png")).code, 0);
  r = run("edgemap --in " + p("w.png") + " --scales 2 --s 1.0 --out-dir " + p("e"));
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, MissingInputExitsThree) {
  EXPECT_EQ(run("edgemap --in " + p("missing.png") + " --scales 2 --out-dir " + p("e")).code, 3);
}

TEST_F(Cli, UnknownFlagRejected) { EXPECT_NE(run("generate --frobnicate 3").code, 0); }

TEST_F(Cli, EdgemapAnalyzeRender) {
  ASSERT_EQ(run("generate --rows 3 --cols 5 --tile 40 --mortar 2 --out " + p("w.png")).code, 0);
  Result r = run("edgemap --in " + p("w.png") + " --scales 1,2 --responses --out-dir " + p("e"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(read_edge_png(dir_ / "e" / "edges_s1.png").width(), 200);
  r = run("analyze --in " + p("w.png") + " --scales 1:1:3 --fill-gap 8 --min-length 90 --overlay 2 --out-dir " +
          p("a"));
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string stats = read_text_file(dir_ / "a" / "tilt_stats.csv");
  EXPECT_EQ(stats.substr(0, stats.find('\n')), "sigma_c,H,V,D1,D2,n_H,n_V,n_D1,n_D2");
  for (const char* kind : {"binary", "jetwhite", "overlay", "accumulator"}) {
    r = run(std::string("render --in ") + p("w.png") + " --sigma 2 --kind " + kind + " --fill-gap 8 --min-length 90 " +
            "--out " + p(std::string(kind) + ".png"));
    EXPECT_EQ(r.code, 0) << kind << " " << r.out;
    EXPECT_TRUE(fs::exists(dir_ / (std::string(kind) + ".png"))) << kind;
  }
}

TEST_F(Cli, ExperimentFromConfig) {
  write_text_file(dir_ / "c.json", R"({"preset": "config-sweep",
    "walls": [{"label": "wall_3x5", "stimulus": {"rows": 3, "cols": 5, "tile_px": 40, "mortar_px": 2, "row_shift_px": 20}}],
    "scales": "1:1:2", "hough": {"fill_gap": 8, "min_length": 90}, "overlay_scales": []})");
  const Result r = run("--threads 2 experiment --config " + p("c.json") + " --out-dir " + p("x"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "x" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir_ / "x" / "wall_3x5_stats.csv"));
}
