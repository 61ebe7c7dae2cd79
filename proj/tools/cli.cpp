#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "fredholm/error.hpp"
#include "fredholm/harness.hpp"
#include "fredholm/index_engines.hpp"
#include "fredholm/text_format.hpp"

namespace fredholm::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Options {
  std::string target;
  std::vector<std::size_t> sizes{64, 128, 256, 512};
  double sv_tol = 1e-8;
  std::optional<std::size_t> buffer;
  std::size_t stabilization = 3;
  std::size_t grid = kDefaultGridSize;
  int bandwidth = kDefaultSeriesBandwidth;
  std::string format = "json";
  std::string out_path;
  std::uint64_t seed = 42;
  bool verbose = false;

  LadderConfig ladder() const {
    LadderConfig l;
    l.sizes = sizes;
    l.sv_tol = sv_tol;
    l.buffer = buffer;
    l.stabilization = stabilization;
    return l;
  }

  SuiteConfig suite() const { return {ladder(), grid, bandwidth, seed}; }
};

void add_common_flags(CLI::App& sub, Options& o) {
  sub.add_option("--sizes", o.sizes, "Ladder of truncation sizes, strictly increasing")
      ->delimiter(',')
      ->capture_default_str();
  sub.add_option("--sv-tol", o.sv_tol, "Relative singular-value tolerance")->capture_default_str();
  sub.add_option("--buffer", o.buffer, "Tall-section surplus rows (default: twice the bandwidth)");
  sub.add_option("--stabilization", o.stabilization, "Consecutive equal ladder rungs required")
      ->capture_default_str();
  sub.add_option("--grid", o.grid, "Unit-circle grid size")->capture_default_str()->check(CLI::PositiveNumber);
  sub.add_option("--bandwidth", o.bandwidth, "Reciprocal bandwidth for the defect-trace series")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub.add_option("--out", o.out_path, "Also write the output to PATH");
  sub.add_option("--seed", o.seed, "Seed for randomized content")->capture_default_str();
  sub.add_flag("-v,--verbose", o.verbose, "Diagnostics on standard error");
}

int code_for(const FredholmError& e) {
  switch (e.kind()) {
    case ErrorKind::NotFredholm: return kNotFredholm;
    case ErrorKind::Parse:
    case ErrorKind::Precondition: return kUsage;
    default: return kFailed;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FredholmError(ErrorKind::Io, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw FredholmError(ErrorKind::Io, "write failed for " + path);
}

class Runner {
 public:
  Runner(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  int index() {
    const OperatorSpec spec = parse_operator_spec(o_.target);
    const LadderConfig ladder = o_.ladder();
    ladder.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const IndexReport report = index_of_spec(spec, ladder, UnitCircleGrid(o_.grid), o_.bandwidth);
    diag("index evaluated in " + elapsed(t0));
    emit(to_json_text(report) + "\n");
    return report.agreed && report.consensus ? kOk : kFailed;
  }

  int wind() {
    const Symbol f = parse_symbol(o_.target);
    const UnitCircleGrid grid = UnitCircleGrid(o_.grid).adapted_to(f);
    const WindingResult unwrap = winding_phase_unwrap(f, grid);
    ordered_json j;
    j["symbol"] = format_symbol(f);
    j["phase_unwrap"] = winding_json(unwrap);
    std::optional<WindingResult> contour;
    try {
      contour = winding_contour(f, grid);
      j["contour"] = winding_json(*contour);
    } catch (const FredholmError& e) {
      if (e.kind() != ErrorKind::Convergence) throw;
      j["contour"] = {{"error", e.what()}};
    }
    const bool agree = contour && contour->value == unwrap.value;
    j["agree"] = agree;
    j["winding"] = agree ? ordered_json(unwrap.value) : ordered_json("undetermined");
    if (o_.format == "csv") {
      std::ostringstream s;
      s << "algorithm,value,residual,margin,grid\n";
      s << "phase_unwrap," << unwrap.value << ',' << format_number(unwrap.residual) << ','
        << format_number(unwrap.margin) << ',' << unwrap.grid_count << '\n';
      if (contour) {
        s << "contour," << contour->value << ',' << format_number(contour->residual) << ','
          << format_number(contour->margin) << ',' << contour->grid_count << '\n';
      }
      emit(s.str());
    } else {
      emit(j.dump(2) + "\n");
    }
    return agree ? kOk : kFailed;
  }

  int converge() {
    const Symbol f = parse_symbol(o_.target);
    const LadderConfig ladder = o_.ladder();
    ladder.validate();
    const UnitCircleGrid base = UnitCircleGrid(o_.grid).adapted_to(f);
    if (!is_invertible_on(f, base)) {
      throw FredholmError(ErrorKind::NotFredholm, "symbol " + format_symbol(f) + " vanishes on the unit circle");
    }

    // Every rung is evaluated; no early stop, so the full history is visible.
    const Symbol fbar = conjugate(f);
    const std::size_t buffer = std::max(ladder.buffer_for(f.bandwidth()), static_cast<std::size_t>(f.bandwidth()));
    std::vector<std::pair<std::size_t, long long>> analytic;
    for (const std::size_t n : ladder.sizes) {
      const auto ker = static_cast<long long>(kernel_dimension(f, n, buffer, ladder.sv_tol));
      const auto coker = static_cast<long long>(kernel_dimension(fbar, n, buffer, ladder.sv_tol));
      analytic.emplace_back(n, ker - coker);
    }

    std::size_t k = base.count();
    while (k < 4 * (2 * static_cast<std::size_t>(o_.bandwidth) + 1)) k *= 2;
    const SeriesTrace series = defect_trace_series(f, o_.bandwidth, UnitCircleGrid(k));

    if (o_.format == "csv") {
      std::ostringstream s;
      s << "kind,param,raw,tail\n";
      for (const auto& [n, v] : analytic) s << "analytic," << n << ',' << v << ",\n";
      for (std::size_t i = 0; i < series.partial_sums.size(); ++i) {
        s << "series," << (i + 1) << ',' << format_number(series.partial_sums[i].real()) << ','
          << format_number(series.tails[i]) << '\n';
      }
      emit(s.str());
    } else {
      ordered_json j;
      j["symbol"] = format_symbol(f);
      ordered_json a = ordered_json::array();
      for (const auto& [n, v] : analytic) a.push_back({{"size", n}, {"raw", v}});
      j["analytic"] = std::move(a);
      ordered_json s = ordered_json::array();
      for (std::size_t i = 0; i < series.partial_sums.size(); ++i) {
        s.push_back({{"bandwidth", i + 1}, {"partial_sum", series.partial_sums[i].real()}, {"tail", series.tails[i]}});
      }
      j["series"] = std::move(s);
      emit(j.dump(2) + "\n");
    }
    return kOk;
  }

  int corpus() {
    const auto entries = load_corpus(o_.target);
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport report = run_corpus(entries, o_.suite());
    diag("corpus of " + std::to_string(entries.size()) + " entries evaluated in " + elapsed(t0));
    return finish_suite(report);
  }

  int selftest() {
    const SuiteConfig config = o_.suite();
    config.ladder.validate();
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport report = run_selftest(o_.seed, config);
    diag("selftest evaluated in " + elapsed(t0));
    return finish_suite(report);
  }

 private:
  static ordered_json winding_json(const WindingResult& w) {
    return {{"value", w.value}, {"raw", w.raw}, {"residual", w.residual}, {"margin", w.margin}, {"grid", w.grid_count}};
  }

  int finish_suite(const SuiteReport& report) {
    out_ << (o_.format == "csv" ? report_csv_text(report) : report_json_text(report, utc_timestamp()));
    if (!o_.out_path.empty()) {
      emit_report(report, o_.out_path, o_.format == "csv" ? ReportFormat::Csv : ReportFormat::Json);
    }
    diag(std::to_string(report.summary.passed) + "/" + std::to_string(report.summary.total) + " passed");
    return report.all_passed() ? kOk : kFailed;
  }

  void emit(const std::string& text) {
    out_ << text;
    if (!o_.out_path.empty()) write_file(o_.out_path, text);
  }

  void diag(const std::string& msg) {
    if (o_.verbose) err_ << msg << '\n';
  }

  static std::string elapsed(std::chrono::steady_clock::time_point t0) {
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    return std::to_string(ms) + " ms";
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fredholm index laboratory: Toeplitz operators, the shift, and compact perturbations"};
  app.name(args.empty() ? "fredholm" : args.front());
  app.require_subcommand(1);

  Options o;
  auto* index = app.add_subcommand("index", "Index of an operator by every applicable engine (JSON report)");
  index->add_option("spec", o.target, "Operator: shift | shift* | toeplitz:<symbol> | scalar:<re>,<im>[+K:...] | "
                                      "perturb:<spec>+K:... | product:[a;b]")
      ->required();
  auto* wind = app.add_subcommand("wind", "Winding number of a symbol by phase unwrapping and contour integral");
  wind->add_option("symbol", o.target, "Symbol: shift | zpow:<k> | affine:<a>,<b> | [(m,re,im),...]")->required();
  auto* corpus = app.add_subcommand("corpus", "Run a corpus file and report per-entry verdicts");
  corpus->add_option("file", o.target, "Corpus JSON file")->required();
  auto* converge = app.add_subcommand("converge", "Analytic ladder and defect-trace series histories of a symbol");
  converge->add_option("symbol", o.target, "Symbol literal")->required();
  auto* selftest = app.add_subcommand("selftest", "Built-in regression corpus; exit 0 iff everything passes");
  for (auto* sub : {index, wind, corpus, converge, selftest}) add_common_flags(*sub, o);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << '\n';
    return kUsage;
  }

  Runner runner(o, out, err);
  try {
    if (index->parsed()) return runner.index();
    if (wind->parsed()) return runner.wind();
    if (corpus->parsed()) return runner.corpus();
    if (converge->parsed()) return runner.converge();
    return runner.selftest();
  } catch (const FredholmError& e) {
    const int code = code_for(e);
    err << app.get_name() << ": " << e.what() << '\n';
    if (code != kUsage) {
      ordered_json j{{"input", o.target}, {"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
      out << j.dump(2) << '\n';
    }
    return code;
  } catch (const std::exception& e) {
    err << app.get_name() << ": " << e.what() << '\n';
    out << ordered_json{{"input", o.target}, {"error", "internal"}, {"message", e.what()}}.dump(2) << '\n';
    return kFailed;
  }
}

}  // namespace fredholm::cli
