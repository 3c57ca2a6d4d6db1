#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "decam/image.hpp"
#include "decam/saliency_io.hpp"
#include "decam/scorer.hpp"

namespace decam {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("decam_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_png(dir_ / "grey.png", Image(ImageShape{24, 24, 1}, 128.0f / 255.0f));
  }

  RunResult run(const std::string& args) {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("env -u DECAM_BRIDGE_CMD '") + DECAM_CLI_PATH + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(out);
    r.err = read_text(err);
    return r;
  }

  std::string path(const char* name) const { return "'" + (dir_ / name).string() + "'"; }

  static std::string fake(const std::string& extra) {
    return std::string("'--scorer=bridge:") + FAKE_BRIDGE_PATH + " --shape 24 24 1 --classes 3 " + extra + "'";
  }

  fs::path dir_;
};

constexpr const char* kQuickDisc = " --scorer disc:12,12,6 --pop 60 --max-iter 80 --alpha 1 --quiet";

TEST_F(Cli, ExplainIsDeterministicAndFindsTheDisc) {
  const auto a = run("explain --image " + path("grey.png") + kQuickDisc + " --seed 4 --out-dir " + path("a"));
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run("explain --image " + path("grey.png") + kQuickDisc + " --seed 4 --out-dir " + path("b"));
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(read_text(dir_ / "a" / "saliency.sm"), read_text(dir_ / "b" / "saliency.sm"));
  EXPECT_EQ(read_text(dir_ / "a" / "saliency.png"), read_text(dir_ / "b" / "saliency.png"));
  for (const char* f : {"trace.csv", "manifest.txt"}) EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;

  const SaliencyMap sm = read_saliency_raw(dir_ / "a" / "saliency.sm");
  const Disc disc{12, 12, 6};
  double inside = 0, total = 0;
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) {
      total += sm.at(r, c);
      if (disc.contains(r, c)) inside += sm.at(r, c);
    }
  EXPECT_GE(inside / total, 0.6);

  const std::string manifest = read_text(dir_ / "a" / "manifest.txt");
  EXPECT_NE(manifest.find("seed=4\n"), std::string::npos);
  EXPECT_NE(manifest.find("scorer=disc:12,12,6\n"), std::string::npos);
  EXPECT_NE(manifest.find("image_sha256="), std::string::npos);
}

TEST_F(Cli, ExplainWithOverlayAndEvaluate) {
  const auto r = run("explain --image " + path("grey.png") +
                     " --scorer disc:12,12,6 --pop 20 --max-iter 10 --alpha 1 --overlay --evaluate --out-dir " +
                     path("o"));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"overlay.png", "insertion.csv", "deletion.csv", "report.txt"})
    EXPECT_TRUE(fs::exists(dir_ / "o" / f)) << f;
  EXPECT_NE(r.out.find("DiffAUC"), std::string::npos);
}

TEST_F(Cli, EvaluateGroundTruthMap) {
  Image noise(ImageShape{24, 24, 1});
  std::uint32_t s = 7;
  for (float& v : noise.data()) {
    s = s * 1664525u + 1013904223u;
    v = static_cast<float>((s >> 24) % 154 + 51) / 255.0f;
  }
  write_png(dir_ / "noise.png", noise);
  SaliencyMap sm{24, 24, std::vector<double>(576, 0.0)};
  const Disc disc{12, 12, 6};
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) sm.values[r * 24 + c] = disc.contains(r, c) ? 1.0 : 0.0;
  write_saliency_raw(dir_ / "gt.sm", sm);

  const auto r = run("evaluate --image " + path("noise.png") + " --sm " + path("gt.sm") +
                     " --scorer disc:12,12,6 --out-dir " + path("e"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string report = read_text(dir_ / "e" / "report.txt");
  const auto at = report.find("diff_auc=");
  ASSERT_NE(at, std::string::npos);
  const double diff = std::stod(report.substr(at + 9));
  EXPECT_TRUE(std::isfinite(diff));
  EXPECT_GT(diff, 0.0);
  EXPECT_NE(r.out.find("AUC insertion"), std::string::npos);
  EXPECT_NE(r.out.find("AUC deletion"), std::string::npos);

  const std::string csv = read_text(dir_ / "e" / "deletion.csv");
  EXPECT_EQ(csv.rfind("x,y\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 102);
}

TEST_F(Cli, EvaluateConstantMapAndTwoSteps) {
  write_saliency_raw(dir_ / "flat.sm", SaliencyMap{24, 24, std::vector<double>(576, 0.5)});
  const auto r = run("evaluate --image " + path("grey.png") + " --sm " + path("flat.sm") +
                     " --scorer disc:12,12,6 --steps 2 --out-dir " + path("f"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_text(dir_ / "f" / "insertion.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);  // header + 3 points
  EXPECT_NE(read_text(dir_ / "f" / "report.txt").find("steps=2\n"), std::string::npos);
}

TEST_F(Cli, EvaluateRejectsMismatchedMap) {
  write_saliency_raw(dir_ / "small.sm", SaliencyMap{20, 20, std::vector<double>(400, 0.5)});
  const auto r = run("evaluate --image " + path("grey.png") + " --sm " + path("small.sm") +
                     " --scorer disc:12,12,6 --out-dir " + path("m"));
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, BadMagicExitsOne) {
  std::ofstream(dir_ / "bad.sm", std::ios::binary) << "NOTASMAP0000000000000000";
  const auto r = run("evaluate --image " + path("grey.png") + " --sm " + path("bad.sm") +
                     " --scorer disc:12,12,6 --out-dir " + path("x"));
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, UnreadableImageExitsOne) {
  const auto r = run("explain --image " + path("missing.png") + kQuickDisc + " --out-dir " + path("x"));
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, BadScorerSpecExitsOne) {
  const auto r = run("explain --image " + path("grey.png") + " --scorer disc:a,b --out-dir " + path("x"));
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, MissingRequiredFlagExitsOne) { EXPECT_EQ(run("explain").code, 1); }

TEST_F(Cli, BridgeFailureExitsTwo) {
  const auto r = run("explain --image " + path("grey.png") + " " + fake("--mode err_handshake") +
                     " --alpha 1 --pop 6 --max-iter 1 --quiet --out-dir " + path("x"));
  EXPECT_EQ(r.code, 2) << r.err;
  const auto mid = run("explain --image " + path("grey.png") + " " + fake("--mode err_score") +
                       " --alpha 1 --pop 6 --max-iter 1 --quiet --out-dir " + path("y"));
  EXPECT_EQ(mid.code, 2) << mid.err;
}

TEST_F(Cli, NoScorerAtAllExitsNonZero) {
  const auto r = run("explain --image " + path("grey.png") + " --out-dir " + path("x"));
  EXPECT_NE(r.code, 0);
}

TEST_F(Cli, BridgeWithoutAlphaWarns) {
  const auto warned = run("explain --image " + path("grey.png") + " " + fake("") +
                          " --pop 6 --max-iter 1 --quiet --out-dir " + path("w"));
  ASSERT_EQ(warned.code, 0) << warned.err;
  EXPECT_NE(warned.err.find("--alpha"), std::string::npos);
  EXPECT_NE(read_text(dir_ / "w" / "manifest.txt").find("alpha_source=default\n"), std::string::npos);

  const auto quiet = run("explain --image " + path("grey.png") + " " + fake("") +
                         " --alpha 0.5 --pop 6 --max-iter 1 --quiet --out-dir " + path("q"));
  ASSERT_EQ(quiet.code, 0) << quiet.err;
  EXPECT_EQ(quiet.err.find("--alpha"), std::string::npos);
}

TEST_F(Cli, SelftestPasses) {
  const auto r = run("selftest");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST_F(Cli, SelftestWithBridge) {
  const auto r = run("selftest " + fake(""));
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

}  // namespace
}  // namespace decam
