#pragma once

// Corpus runner and invariance suites. Corpus entries are evaluated
// concurrently; results are merged in corpus order so reports are
// reproducible byte for byte (apart from the timestamp).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fredholm/error.hpp"
#include "fredholm/index_engines.hpp"
#include "fredholm/operator_lab.hpp"
#include "fredholm/symbol.hpp"

namespace fredholm {

enum class Provenance {
  Literature,  // a classical published value; carries a citation
  Derived,     // computed by an independent oracle
  Random,      // generated from a seed
};

std::string_view to_string(Provenance p);

struct CorpusEntry {
  std::string name;
  OperatorSpec spec;
  std::optional<int> expected;  // nullopt is "unknown"
  Provenance provenance = Provenance::Derived;
  std::string citation;
  std::optional<std::uint64_t> seed;
};

struct EntryResult {
  CorpusEntry entry;
  std::optional<IndexReport> report;
  std::string error;  // empty unless evaluation threw
  bool pass = false;
};

/// A named invariance check (homotopy path, perturbation family) in a report.
struct CheckResult {
  std::string name;
  std::string kind;
  bool pass = false;
  std::vector<std::optional<int>> indices;
  std::string error;
};

struct SuiteSummary {
  std::size_t total = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t errors = 0;

  friend bool operator==(const SuiteSummary&, const SuiteSummary&) = default;
};

struct SuiteConfig {
  LadderConfig ladder;
  std::size_t grid_size = kDefaultGridSize;
  int series_bandwidth = kDefaultSeriesBandwidth;
  std::optional<std::uint64_t> seed;
};

struct SuiteReport {
  std::vector<EntryResult> entries;
  std::vector<CheckResult> checks;
  SuiteSummary summary;
  SuiteConfig config;

  bool all_passed() const noexcept { return summary.failed == 0 && summary.total > 0; }
};

/// Recomputes the summary from entries and checks.
void summarize(SuiteReport& report);

/// Evaluates every entry with index_of_spec. A throwing entry is recorded as a
/// failure and never stops the others. `threads` = 0 uses the hardware count.
SuiteReport run_corpus(const std::vector<CorpusEntry>& corpus, const SuiteConfig& config, unsigned threads = 0);

struct HomotopyOutcome {
  bool pass = false;
  std::vector<int> indices;
  std::vector<double> margins;
};

/// Topological index at every waypoint. Throws FredholmError(Precondition)
/// if path_check rejects the path; no index is computed in that case.
HomotopyOutcome homotopy_suite(const SymbolPath& path, const LadderConfig& ladder, const UnitCircleGrid& grid);

struct PerturbationOutcome {
  bool pass = false;
  std::optional<int> base_index;
  std::vector<std::optional<int>> perturbed_indices;
};

PerturbationOutcome perturbation_suite(const Symbol& f, const std::vector<PerturbationSpec>& perturbations,
                                       const LadderConfig& ladder, const UnitCircleGrid& grid,
                                       int series_bandwidth = kDefaultSeriesBandwidth);

enum class ReportFormat { Json, Csv };

/// `timestamp` is written as "generated_at"; pass nullopt to omit it.
std::string report_json_text(const SuiteReport& report, const std::optional<std::string>& timestamp);
/// name,expected,consensus,agreed,pass
std::string report_csv_text(const SuiteReport& report);
/// Writes the report with a current UTC timestamp. Throws FredholmError(Io).
void emit_report(const SuiteReport& report, const std::filesystem::path& path, ReportFormat format);
/// Reads back the summary block of a JSON report.
SuiteSummary parse_summary_json(std::string_view text);
std::string utc_timestamp();

/// Corpus files are JSON arrays of
///   {"name": ..., "spec": <operator text>, "expected": <int>|"unknown",
///    "provenance"?: "literature"|"derived"|"random", "citation"?: ..., "seed"?: <uint>}
std::vector<CorpusEntry> parse_corpus_json(std::string_view text);
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);

/// Winding number by the argument principle on a dense grid, evaluated
/// pointwise with its own summation. Kept apart from the engines so the
/// harness has an independent opinion for random entries.
int zero_counting_winding(const Symbol& f, std::size_t points = 8192);

/// Random trigonometric polynomial with modes in [-3, 3], rejection-sampled
/// until the margin exceeds 0.1 and the reciprocal tail at bandwidth 64 is
/// below 1e-10.
Symbol random_certified_symbol(std::mt19937_64& rng);
/// `count` random Toeplitz entries; expectations from zero_counting_winding.
std::vector<CorpusEntry> random_symbol_corpus(std::size_t count, std::uint64_t seed);
/// Sum of `rank` outer products supported on indices < support.
PerturbationSpec random_perturbation(std::mt19937_64& rng, std::size_t rank, std::size_t support);

/// Classical values: shift, z^{+-1}, z^{+-2}, scalar-plus-finite-rank operators,
/// two homotopy paths and two perturbation families. Perturbations come from `seed`.
SuiteReport run_selftest(std::uint64_t seed, const SuiteConfig& config);

}  // namespace fredholm
