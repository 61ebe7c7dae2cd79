#include "fredholm/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fredholm/error.hpp"
#include "fredholm/text_format.hpp"
#include "oracles.hpp"

namespace fredholm {
namespace {

const UnitCircleGrid kGrid(kDefaultGridSize);

CorpusEntry entry(std::string name, std::string_view spec, std::optional<int> expected) {
  return {std::move(name), parse_operator_spec(spec), expected, Provenance::Derived, "", std::nullopt};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fredholm_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

TEST(RunCorpus, SingleEntries) {
  const auto shift = run_corpus({entry("shift", "shift", -1)}, SuiteConfig{});
  EXPECT_EQ(shift.summary, (SuiteSummary{1, 1, 0, 0}));
  EXPECT_TRUE(shift.all_passed());
  const auto id = run_corpus({entry("identity", "identity", 0)}, SuiteConfig{});
  EXPECT_EQ(id.summary.passed, 1u);
}

TEST(RunCorpus, UnknownExpectedPassesOnAgreement) {
  const auto r = run_corpus({entry("z2", "toeplitz:zpow:2", std::nullopt)}, SuiteConfig{});
  EXPECT_TRUE(r.entries[0].pass);
  EXPECT_EQ(r.entries[0].report->consensus, -2);
}

TEST(RunCorpus, WrongExpectationFails) {
  const auto r = run_corpus({entry("shift", "shift", 1)}, SuiteConfig{});
  EXPECT_FALSE(r.entries[0].pass);
  EXPECT_EQ(r.summary.failed, 1u);
  EXPECT_FALSE(r.all_passed());
}

TEST(RunCorpus, ErrorsAreIsolated) {
  const auto r = run_corpus({entry("bad", "toeplitz:affine:1,1", -1), entry("shift", "shift", -1),
                             entry("zero", "scalar:0,0", 0), entry("adj", "shift*", 1)},
                            SuiteConfig{}, 2);
  ASSERT_EQ(r.entries.size(), 4u);
  EXPECT_EQ(r.entries[0].entry.name, "bad");
  EXPECT_FALSE(r.entries[0].error.empty());
  EXPECT_TRUE(r.entries[1].pass);
  EXPECT_FALSE(r.entries[2].error.empty());
  EXPECT_TRUE(r.entries[3].pass);
  EXPECT_EQ(r.summary, (SuiteSummary{4, 2, 2, 2}));
}

TEST(RunCorpus, RandomCorpusSeed42AllAgreed) {
  const auto corpus = random_symbol_corpus(20, 42);
  ASSERT_EQ(corpus.size(), 20u);
  for (const auto& e : corpus) {
    EXPECT_EQ(e.provenance, Provenance::Random);
    EXPECT_TRUE(e.seed.has_value());
    // the harness oracle against the companion-matrix oracle
    const Symbol f = e.spec.as<ToeplitzOp>()->symbol;
    EXPECT_EQ(e.expected, -oracle::winding_by_roots(f));
    EXPECT_GT(oracle::dense_margin(f), 0.1 - 1e-3);
  }
  const auto r = run_corpus(corpus, SuiteConfig{});
  for (const auto& e : r.entries) EXPECT_TRUE(e.pass) << e.entry.name << " " << e.error;
}

TEST(RunCorpus, ParallelMatchesSequential) {
  const auto corpus = random_symbol_corpus(6, 3);
  SuiteConfig config;
  config.seed = 3;
  EXPECT_EQ(report_json_text(run_corpus(corpus, config, 1), std::nullopt),
            report_json_text(run_corpus(corpus, config, 4), std::nullopt));
}

TEST(Homotopy, ScalingPath) {
  const auto r = homotopy_suite({Symbol::monomial(1), Symbol::monomial(1, 2.0), 10}, LadderConfig{}, kGrid);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.indices.size(), 10u);
  for (int i : r.indices) EXPECT_EQ(i, -1);
}

TEST(Homotopy, AffinePathInsideDisk) {
  // zeros at -0.5 ... -0.9 all inside the disk
  const auto r = homotopy_suite({Symbol::affine(0.5, 1.0), Symbol::affine(0.9, 1.0), 10}, LadderConfig{}, kGrid);
  EXPECT_TRUE(r.pass);
  for (int i : r.indices) EXPECT_EQ(i, -1);
}

TEST(Homotopy, CrossingPathRejected) {
  try {
    homotopy_suite({Symbol::affine(0.5, 1.0), Symbol::affine(2.0, 1.0), 10}, LadderConfig{}, kGrid);
    FAIL();
  } catch (const FredholmError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}

TEST(Perturbation, Examples) {
  const LadderConfig ladder;
  const auto corner = perturbation_suite(Symbol::monomial(1), {PerturbationSpec({{0, 0, 1.0}})}, ladder, kGrid);
  EXPECT_TRUE(corner.pass);
  EXPECT_EQ(corner.base_index, -1);
  ASSERT_EQ(corner.perturbed_indices.size(), 1u);
  EXPECT_EQ(corner.perturbed_indices[0], -1);

  const auto zero = perturbation_suite(Symbol::monomial(1), {PerturbationSpec{}}, ladder, kGrid);
  EXPECT_TRUE(zero.pass);

  std::mt19937_64 rng(7);
  const auto rank2 = perturbation_suite(Symbol::affine(0.5, 1.0), {random_perturbation(rng, 2, 6)}, ladder, kGrid);
  EXPECT_TRUE(rank2.pass);
  EXPECT_EQ(rank2.perturbed_indices[0], -1);
}

TEST(RandomPerturbation, RankAndSupport) {
  std::mt19937_64 rng(1);
  const auto k = random_perturbation(rng, 2, 6);
  ASSERT_TRUE(k.max_index());
  EXPECT_LT(*k.max_index(), 6u);
  Matrix m = Matrix::Zero(6, 6);
  for (const auto& t : k.terms()) m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
  Eigen::JacobiSVD<Matrix> svd(m);
  svd.setThreshold(1e-10);
  EXPECT_EQ(svd.rank(), 2);
}

TEST(ZeroCounting, MatchesRootOracle) {
  EXPECT_EQ(zero_counting_winding(Symbol::monomial(3)), 3);
  EXPECT_EQ(zero_counting_winding(Symbol({1.5, -5.3, 1.0}, 0)), 1);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol f = random_certified_symbol(rng);
    EXPECT_EQ(zero_counting_winding(f), oracle::winding_by_roots(f));
  }
}

TEST(Reports, EmptyReportIsValidJson) {
  SuiteReport empty;
  summarize(empty);
  const auto j = nlohmann::json::parse(report_json_text(empty, std::nullopt));
  EXPECT_EQ(j["entries"].size(), 0u);
  EXPECT_EQ(j["summary"]["total"], 0);
  EXPECT_FALSE(empty.all_passed());
}

TEST(Reports, CsvHasHeaderAndRows) {
  const auto r = run_corpus({entry("shift", "shift", -1), entry("adj", "shift*", 1), entry("id", "identity", 0)},
                            SuiteConfig{});
  const std::string csv = report_csv_text(r);
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "name,expected,consensus,agreed,pass");
  EXPECT_EQ(lines[1], "shift,-1,-1,true,true");
}

TEST(Reports, EmitAndParseBackSummary) {
  const auto r = run_corpus({entry("shift", "shift", -1), entry("bad", "shift", 3)}, SuiteConfig{});
  const auto path = temp_path("report.json");
  emit_report(r, path, ReportFormat::Json);
  const std::string text = slurp(path);
  EXPECT_EQ(parse_summary_json(text), r.summary);
  EXPECT_TRUE(nlohmann::json::parse(text).contains("generated_at"));
  std::filesystem::remove(path);

  const auto csv = temp_path("report.csv");
  emit_report(r, csv, ReportFormat::Csv);
  EXPECT_EQ(slurp(csv), report_csv_text(r));
  std::filesystem::remove(csv);
}

TEST(Reports, UnwritableLocationNamesPath) {
  SuiteReport r;
  try {
    emit_report(r, "/nonexistent-dir/report.json", ReportFormat::Json);
    FAIL();
  } catch (const FredholmError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/report.json"), std::string::npos);
  }
}

TEST(CorpusFile, ParseAndLoad) {
  const std::string text = R"([
    {"name": "shift", "spec": "shift", "expected": -1, "provenance": "literature", "citation": "Coburn"},
    {"name": "z2", "spec": "toeplitz:zpow:2", "expected": "unknown"},
    {"name": "r", "spec": "toeplitz:affine:0.5,1", "expected": -1, "provenance": "random", "seed": 9}
  ])";
  const auto corpus = parse_corpus_json(text);
  ASSERT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus[0].provenance, Provenance::Literature);
  EXPECT_EQ(corpus[0].citation, "Coburn");
  EXPECT_FALSE(corpus[1].expected);
  EXPECT_EQ(corpus[2].seed, 9u);

  const auto path = temp_path("corpus.json");
  std::ofstream(path) << text;
  EXPECT_EQ(load_corpus(path).size(), 3u);
  std::filesystem::remove(path);
}

TEST(CorpusFile, Errors) {
  auto kind = [](std::string_view text) {
    try {
      parse_corpus_json(text);
    } catch (const FredholmError& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind("{"), ErrorKind::Parse);
  EXPECT_EQ(kind("[]"), ErrorKind::Parse);
  EXPECT_EQ(kind(R"([{"name": "x", "spec": "shift", "expected": -1, "provenance": "literature"}])"), ErrorKind::Parse);
  EXPECT_EQ(kind(R"([{"name": "x", "spec": "shift", "expected": -1, "provenance": "random"}])"), ErrorKind::Parse);
  EXPECT_EQ(kind(R"([{"name": "x", "spec": "nope", "expected": -1}])"), ErrorKind::Parse);
  try {
    load_corpus("/nonexistent/corpus.json");
    FAIL();
  } catch (const FredholmError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Selftest, PassesAndIsDeterministic) {
  SuiteConfig config;
  config.seed = 42;
  const auto a = run_selftest(42, config);
  EXPECT_TRUE(a.all_passed());
  for (const auto& e : a.entries) {
    EXPECT_TRUE(e.pass) << e.entry.name << " " << e.error;
    if (e.entry.provenance == Provenance::Literature) {
      EXPECT_FALSE(e.entry.citation.empty());
    }
  }
  for (const auto& c : a.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.error;
  EXPECT_EQ(a.checks.size(), 4u);
  const auto b = run_selftest(42, config);
  EXPECT_EQ(report_json_text(a, std::nullopt), report_json_text(b, std::nullopt));
}

TEST(Selftest, DestroyedToleranceFails) {
  SuiteConfig config;
  config.ladder.sv_tol = 10.0;  // every singular value counts as kernel
  EXPECT_FALSE(run_selftest(42, config).all_passed());
}

}  // namespace
}  // namespace fredholm
