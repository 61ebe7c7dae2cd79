#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fredholm::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fredholm");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Outcome& o) { return nlohmann::json::parse(o.out); }

TEST(CliIndex, Shift) {
  const auto o = run_cli({"index", "shift"});
  EXPECT_EQ(o.code, kOk);
  const auto j = json_of(o);
  EXPECT_EQ(j["consensus"], -1);
  EXPECT_EQ(j["agreed"], true);
}

TEST(CliIndex, ConstantSymbol) {
  const auto o = run_cli({"index", "toeplitz:affine:1,0"});
  EXPECT_EQ(o.code, kOk);
  EXPECT_EQ(json_of(o)["consensus"], 0);
}

TEST(CliIndex, MalformedSpecExitsThreeNamingToken) {
  const auto o = run_cli({"index", "toeplitz:affine:0,1+z-modes"});
  EXPECT_EQ(o.code, kUsage);
  EXPECT_NE(o.err.find("1+z-modes"), std::string::npos) << o.err;
}

TEST(CliIndex, NotFredholmExitsTwo) {
  const auto o = run_cli({"index", "toeplitz:affine:1,1"});
  EXPECT_EQ(o.code, kNotFredholm);
  const auto j = json_of(o);
  EXPECT_EQ(j["error"], "not-fredholm");
  EXPECT_EQ(run_cli({"index", "scalar:0,0+K:[(0,0,1)]"}).code, kNotFredholm);
}

TEST(CliIndex, UndeterminedEngineAbstains) {
  // two rungs cannot meet a stabilization count of three
  const auto o = run_cli({"index", "shift", "--sizes", "16,32", "--stabilization", "3"});
  EXPECT_EQ(o.code, kOk);
  const auto j = json_of(o);
  EXPECT_EQ(j["engines"][1]["name"], "analytic");
  EXPECT_EQ(j["engines"][1]["value"], "undetermined");
  EXPECT_EQ(j["consensus"], -1);
}

TEST(CliIndex, InvalidOverridesExitThree) {
  EXPECT_EQ(run_cli({"index", "shift", "--sizes", "128,64"}).code, kUsage);
  EXPECT_EQ(run_cli({"index", "shift", "--stabilization", "1"}).code, kUsage);
  EXPECT_EQ(run_cli({"index", "shift", "--sv-tol", "0"}).code, kUsage);
  EXPECT_EQ(run_cli({"index", "shift", "--sv-tol", "10"}).code, kFailed);  // counts destroyed, engines disagree
  EXPECT_EQ(run_cli({"index", "shift", "--format", "xml"}).code, kUsage);
  EXPECT_EQ(run_cli({"index", "shift", "--no-such-flag"}).code, kUsage);
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
}

TEST(CliHelp, ListsCommandsAndFlags) {
  const auto o = run_cli({"--help"});
  EXPECT_EQ(o.code, kOk);
  for (const char* word : {"index", "wind", "corpus", "converge", "selftest"}) {
    EXPECT_NE(o.out.find(word), std::string::npos) << word;
  }
  const auto all = run_cli({"index", "--help"});
  for (const char* flag : {"--sizes", "--sv-tol", "--buffer", "--stabilization", "--grid", "--bandwidth", "--format",
                           "--out", "--seed", "--verbose"}) {
    EXPECT_NE(all.out.find(flag), std::string::npos) << flag;
  }
}

TEST(CliWind, Examples) {
  auto w = [](const std::string& s) {
    const auto o = run_cli({"wind", s});
    EXPECT_EQ(o.code, kOk) << o.err;
    return json_of(o)["winding"];
  };
  EXPECT_EQ(w("zpow:1"), 1);
  EXPECT_EQ(w("zpow:-3"), -3);
  EXPECT_EQ(w("affine:0.5,1"), 1);
  const auto bad = run_cli({"wind", "affine:1,-1"});
  EXPECT_EQ(bad.code, kNotFredholm);
  EXPECT_NO_THROW(json_of(bad));
}

TEST(CliWind, Csv) {
  const auto o = run_cli({"wind", "shift", "--format", "csv"});
  EXPECT_EQ(o.code, kOk);
  EXPECT_EQ(o.out.rfind("algorithm,value,residual,margin,grid\nphase_unwrap,1,", 0), 0u) << o.out;
}

TEST(CliConverge, ShiftAnalyticConstant) {
  const auto o = run_cli({"converge", "shift"});
  ASSERT_EQ(o.code, kOk);
  const auto j = json_of(o);
  ASSERT_EQ(j["analytic"].size(), 4u);
  EXPECT_EQ(j["analytic"][0]["size"], 64);
  for (const auto& a : j["analytic"]) EXPECT_EQ(a["raw"], -1);
}

TEST(CliConverge, SquareSeriesExactFromTwo) {
  const auto o = run_cli({"converge", "zpow:2", "--bandwidth", "8"});
  ASSERT_EQ(o.code, kOk);
  const auto series = json_of(o)["series"];
  ASSERT_EQ(series.size(), 8u);
  for (std::size_t b = 1; b < series.size(); ++b) EXPECT_EQ(series[b]["partial_sum"], -2.0) << b;
}

TEST(CliConverge, GeometricTailDecaysInCsv) {
  const auto o = run_cli({"converge", "affine:1,0.5", "--format", "csv", "--bandwidth", "40"});
  ASSERT_EQ(o.code, kOk);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,param,raw,tail");
  std::vector<double> tails;
  while (std::getline(in, line)) {
    if (line.rfind("series,", 0) != 0) continue;
    tails.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  ASSERT_EQ(tails.size(), 40u);
  for (std::size_t i = 1; i < tails.size() && tails[i] > 1e-15; ++i) EXPECT_LE(tails[i], tails[i - 1]) << i;
  EXPECT_EQ(run_cli({"converge", "affine:1,1"}).code, kNotFredholm);
}

TEST(CliCorpus, RunsFileAndWritesReport) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto corpus = dir / "fredholm_cli_corpus.json";
  const auto report = dir / "fredholm_cli_report.csv";
  std::ofstream(corpus) << R"([{"name": "shift", "spec": "shift", "expected": -1},
                               {"name": "adj", "spec": "shift*", "expected": 1}])";
  const auto o = run_cli({"corpus", corpus.string(), "--format", "csv", "--out", report.string()});
  EXPECT_EQ(o.code, kOk) << o.err;
  EXPECT_TRUE(std::filesystem::exists(report));
  EXPECT_EQ(run_cli({"corpus", (dir / "fredholm_missing.json").string()}).code, kFailed);
  std::filesystem::remove(corpus);
  std::filesystem::remove(report);
}

TEST(CliSelftest, PassesAndDestroyedToleranceFails) {
  const auto o = run_cli({"selftest"});
  EXPECT_EQ(o.code, kOk) << o.out;
  EXPECT_TRUE(json_of(o).contains("generated_at"));
  const auto broken = run_cli({"selftest", "--sv-tol", "10"});
  EXPECT_NE(broken.code, kOk);
}

}  // namespace
}  // namespace fredholm::cli
