#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "hsiband/cli.hpp"
#include "hsiband/info_theory.hpp"
#include "hsiband/synth_scene.hpp"
#include "test_support.hpp"

namespace hsiband::cli {
namespace {

using testing::slurp;
using testing::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// X, an exact copy of X, and Z marking a disjoint region; labels name the
// three regions.
class CliScene : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::size_t n = 60;
    std::vector<std::uint8_t> labels(n);
    std::vector<std::uint16_t> s(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto region = static_cast<std::uint8_t>(i % 3);
      labels[i] = static_cast<std::uint8_t>(region + 1);
      s[i] = s[n + i] = region == 0 ? 1000 : 0;
      s[2 * n + i] = region == 1 ? 1000 : 0;
    }
    write_cube(HsiCube(3, 2, n / 2, s), dir_ / "cube.json", dir_ / "cube.raw");
    write_ground_truth(GroundTruth(2, n / 2, labels, 3), dir_ / "gt.pgm");
  }

  std::vector<std::string> data(const std::string& out) const {
    return {"--cube-header", (dir_ / "cube.json").string(), "--cube-data", (dir_ / "cube.raw").string(),
            "--gt",          (dir_ / "gt.pgm").string(),    "--out-dir",   (dir_ / out).string()};
  }

  std::vector<std::string> cmd(const std::string& name, const std::string& out,
                               const std::vector<std::string>& extra = {}) const {
    std::vector<std::string> a{name};
    const auto d = data(out);
    a.insert(a.end(), d.begin(), d.end());
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  }

  TempDir dir_;
};

TEST_F(CliScene, InfoWritesOneRowPerBand) {
  const auto r = invoke(cmd("info", "info"));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto csv = slurp(dir_ / "info" / "mi_curve.csv");
  EXPECT_EQ(line_count(csv), 4u);
  EXPECT_EQ(csv.rfind("band,mi_bits\n", 0), 0u);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "info" / "manifest.json"));
}

TEST_F(CliScene, InfoFanoColumnsAreOrdered) {
  ASSERT_EQ(invoke(cmd("info", "info", {"--fano"})).code, kExitOk);
  std::istringstream in(slurp(dir_ / "info" / "mi_curve.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "band,mi_bits,class_entropy,conditional_entropy,fano_lower,fano_upper");
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 6u);
    const auto f = info::fano_bounds(v[2], v[1], 3);
    EXPECT_DOUBLE_EQ(v[4], f.lower);
    EXPECT_DOUBLE_EQ(v[5], f.upper);
    EXPECT_LE(v[4], v[5]);
  }
}

TEST_F(CliScene, SelectDropsOneDuplicate) {
  const auto r = invoke(cmd("select", "sel", {"--th-relevance", "0", "--th-redundancy", "0.9"}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "sel" / "selection.json"));
  EXPECT_EQ(j["selected"], nlohmann::json::array({0, 2}));
  EXPECT_EQ(line_count(slurp(dir_ / "sel" / "matrix.csv")), 4u);
}

TEST_F(CliScene, EmptySelectionWarnsButSucceeds) {
  const auto r = invoke(cmd("select", "sel", {"--th-relevance", "50"}));
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir_ / "sel" / "selection.json"));
  EXPECT_TRUE(j["selected"].empty());
}

TEST_F(CliScene, SweepTwoByTwoBothMeasures) {
  const auto r = invoke(cmd("sweep", "sw", {"--relevance-grid", "0,0.5", "--redundancy-grid", "0.5,0.9", "--measure",
                                            "both"}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const auto* name : {"sweep_as.csv", "sweep_u.csv"}) {
    const auto csv = slurp(dir_ / "sw" / name);
    EXPECT_EQ(line_count(csv), 5u) << name;
    EXPECT_EQ(csv.find('\r'), std::string::npos);
  }
}

TEST_F(CliScene, ClassifyFromSelectionFile) {
  ASSERT_EQ(invoke(cmd("select", "sel", {"--th-relevance", "0", "--th-redundancy", "0.9"})).code, kExitOk);
  const auto r = invoke(cmd("classify", "cls",
                            {"--selection", (dir_ / "sel" / "selection.json").string(), "--full-scene",
                             "--export-design"}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rep = nlohmann::json::parse(slurp(dir_ / "cls" / "report.json"));
  EXPECT_EQ(rep["overall_accuracy"], 1.0);
  const auto map = read_ground_truth(dir_ / "cls" / "map.pgm", 3);
  for (const auto l : map.labels()) EXPECT_NE(l, 0);
  EXPECT_EQ(line_count(slurp(dir_ / "cls" / "confusion.csv")), 4u);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "cls" / "train.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "cls" / "test.csv"));
}

TEST_F(CliScene, ResultFilesAreByteIdenticalAcrossRuns) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"info", {"--fano"}},
      {"select", {"--th-relevance", "0"}},
      {"sweep", {"--relevance-grid", "0,0.5", "--measure", "both"}},
      {"classify", {"--bands", "0,2", "--classifier", "knn", "--k", "3"}},
  };
  for (const auto& [name, extra] : runs) {
    ASSERT_EQ(invoke(cmd(name, name + "_a", extra)).code, kExitOk) << name;
    ASSERT_EQ(invoke(cmd(name, name + "_b", extra)).code, kExitOk) << name;
    for (const auto& e : std::filesystem::directory_iterator(dir_ / (name + "_a"))) {
      const auto file = e.path().filename();
      if (file == "manifest.json") continue;
      EXPECT_EQ(slurp(e.path()), slurp(dir_ / (name + "_b") / file)) << name << "/" << file;
    }
  }
}

TEST_F(CliScene, ExitCodes) {
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({"info"}).code, kExitUsage);
  EXPECT_EQ(invoke(cmd("select", "x", {"--th-redundancy", "1.5"})).code, kExitUsage);
  EXPECT_EQ(invoke(cmd("classify", "x")).code, kExitUsage);
  EXPECT_EQ(invoke(cmd("classify", "x", {"--bands", "0", "--classifier", "knn", "--k", "2"})).code, kExitUsage);

  auto missing = cmd("info", "x");
  missing[2] = (dir_ / "absent.json").string();
  EXPECT_EQ(invoke(missing).code, kExitData);

  testing::spit(dir_ / "short.raw", std::string(10, '\0'));
  auto truncated = cmd("info", "x");
  truncated[4] = (dir_ / "short.raw").string();
  const auto r = invoke(truncated);
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("error"), std::string::npos);

  EXPECT_EQ(invoke(cmd("classify", "x", {"--bands", "7"})).code, kExitData);
  EXPECT_EQ(invoke({"--version"}).code, kExitOk);
}

TEST(CliSynth, DefaultSceneAndDeterminism) {
  TempDir dir;
  const std::vector<std::string> a{"synth", "--rows", "40", "--cols", "40", "--num-classes", "8",
                                   "--seed", "5", "--out-dir", (dir / "a").string()};
  auto b = a;
  b.back() = (dir / "b").string();
  ASSERT_EQ(invoke(a).code, kExitOk);
  ASSERT_EQ(invoke(b).code, kExitOk);
  for (const auto* f : {"cube.json", "cube.raw", "recipe.json", "gt.pgm"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  const auto cube = read_cube(dir / "a" / "cube.json", dir / "a" / "cube.raw");
  EXPECT_EQ(cube.bands(), 19u);
  const auto gt = read_ground_truth(dir / "a" / "gt.pgm", 8);
  EXPECT_EQ(cube.rows(), gt.rows());

  // Re-synthesize from the written map with the echoed recipe.
  const std::vector<std::string> c{"synth", "--gt", (dir / "a" / "gt.pgm").string(), "--num-classes", "8",
                                   "--recipe", (dir / "a" / "recipe.json").string(), "--out-dir",
                                   (dir / "c").string()};
  ASSERT_EQ(invoke(c).code, kExitOk);
  EXPECT_EQ(slurp(dir / "a" / "cube.raw"), slurp(dir / "c" / "cube.raw"));
}

TEST(CliSynth, TooFewClassesIsAConfigError) {
  TempDir dir;
  EXPECT_EQ(invoke({"synth", "--rows", "20", "--cols", "20", "--num-classes", "3", "--out-dir", dir.path().string()})
                .code,
            kExitUsage);
}

TEST(CliFano, PrintsBounds) {
  const auto r = invoke({"fano", "--class-entropy", "4", "--mi", "0", "--num-classes", "16"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "class_entropy,mi_bits,num_classes,conditional_entropy,fano_lower,fano_upper\n4,0,16,4,0.75,1\n");
  EXPECT_EQ(invoke({"fano", "--class-entropy", "4", "--mi", "0", "--num-classes", "1"}).code, kExitUsage);
  EXPECT_EQ(invoke({"fano", "--class-entropy", "1", "--mi", "2", "--num-classes", "4"}).code, kExitUsage);
}

}  // namespace
}  // namespace hsiband::cli
