#include "fredholm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "fredholm/text_format.hpp"
#include "json_io.hpp"

namespace fredholm {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Literature: return "literature";
    case Provenance::Derived: return "derived";
    case Provenance::Random: return "random";
  }
  return "unknown";
}

namespace {

Provenance parse_provenance(std::string_view s) {
  if (s == "literature") return Provenance::Literature;
  if (s == "derived") return Provenance::Derived;
  if (s == "random") return Provenance::Random;
  throw FredholmError(ErrorKind::Parse, "unknown provenance '" + std::string(s) + "'");
}

bool entry_passes(const CorpusEntry& entry, const IndexReport& report) {
  if (!report.agreed) return false;
  if (!entry.expected) return true;
  return report.consensus == entry.expected;
}

EntryResult evaluate_entry(const CorpusEntry& entry, const SuiteConfig& config, const UnitCircleGrid& grid) {
  EntryResult r{entry, std::nullopt, {}, false};
  try {
    r.report = index_of_spec(entry.spec, config.ladder, grid, config.series_bandwidth);
    r.pass = entry_passes(entry, *r.report);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

ordered_json optional_int(const std::optional<int>& v, const char* absent) {
  return v ? ordered_json(*v) : ordered_json(absent);
}

}  // namespace

void summarize(SuiteReport& report) {
  SuiteSummary s;
  for (const auto& e : report.entries) {
    ++s.total;
    if (e.pass) ++s.passed;
    if (!e.error.empty()) ++s.errors;
  }
  for (const auto& c : report.checks) {
    ++s.total;
    if (c.pass) ++s.passed;
    if (!c.error.empty()) ++s.errors;
  }
  s.failed = s.total - s.passed;
  report.summary = s;
}

SuiteReport run_corpus(const std::vector<CorpusEntry>& corpus, const SuiteConfig& config, unsigned threads) {
  if (corpus.empty()) throw FredholmError(ErrorKind::Precondition, "corpus is empty");
  config.ladder.validate();
  const UnitCircleGrid grid(config.grid_size);

  SuiteReport report;
  report.config = config;
  std::vector<std::optional<EntryResult>> results(corpus.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, corpus.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      results[i] = evaluate_entry(corpus[i], config, grid);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  report.entries.reserve(results.size());
  for (auto& r : results) report.entries.push_back(std::move(*r));
  summarize(report);
  return report;
}

HomotopyOutcome homotopy_suite(const SymbolPath& path, const LadderConfig& ladder, const UnitCircleGrid& grid) {
  ladder.validate();
  const PathCheck check = path_check(path, grid);
  if (!check.accepted) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < check.margins.size(); ++i) {
      if (check.margins[i] < check.margins[worst]) worst = i;
    }
    throw FredholmError(ErrorKind::Precondition, "path rejected: waypoint " + std::to_string(worst) +
                                                     " has margin " + format_number(check.margins[worst]));
  }
  HomotopyOutcome out;
  out.margins = check.margins;
  for (std::size_t i = 0; i < path.waypoints; ++i) {
    const Symbol w = path.waypoint(i);
    const IndexEstimate e = index_topological(w, grid.adapted_to(w));
    if (!e.value) {
      throw FredholmError(ErrorKind::Convergence, "no topological index at waypoint " + std::to_string(i));
    }
    out.indices.push_back(*e.value);
  }
  out.pass = std::all_of(out.indices.begin(), out.indices.end(), [&](int v) { return v == out.indices.front(); });
  return out;
}

PerturbationOutcome perturbation_suite(const Symbol& f, const std::vector<PerturbationSpec>& perturbations,
                                       const LadderConfig& ladder, const UnitCircleGrid& grid, int series_bandwidth) {
  PerturbationOutcome out;
  const OperatorSpec base = OperatorSpec::toeplitz(f);
  const IndexReport base_report = index_of_spec(base, ladder, grid, series_bandwidth);
  if (base_report.agreed) out.base_index = base_report.consensus;
  out.pass = out.base_index.has_value();
  for (const auto& k : perturbations) {
    const IndexReport r = index_of_spec(OperatorSpec::perturbed(base, k), ladder, grid, series_bandwidth);
    const std::optional<int> v = r.agreed ? r.consensus : std::nullopt;
    out.perturbed_indices.push_back(v);
    if (!v || v != out.base_index) out.pass = false;
  }
  return out;
}

std::string report_json_text(const SuiteReport& report, const std::optional<std::string>& timestamp) {
  ordered_json j;
  if (timestamp) j["generated_at"] = *timestamp;

  ordered_json config = detail::ladder_to_json(report.config.ladder);
  config["grid"] = report.config.grid_size;
  config["bandwidth"] = report.config.series_bandwidth;
  config["seed"] = report.config.seed ? ordered_json(*report.config.seed) : ordered_json(nullptr);
  j["config"] = std::move(config);

  j["summary"] = {{"total", report.summary.total},
                  {"passed", report.summary.passed},
                  {"failed", report.summary.failed},
                  {"errors", report.summary.errors}};

  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json je;
    je["name"] = e.entry.name;
    je["spec"] = format_operator_spec(e.entry.spec);
    je["expected"] = optional_int(e.entry.expected, "unknown");
    je["provenance"] = std::string(to_string(e.entry.provenance));
    if (!e.entry.citation.empty()) je["citation"] = e.entry.citation;
    if (e.entry.seed) je["seed"] = *e.entry.seed;
    je["pass"] = e.pass;
    if (!e.error.empty()) je["error"] = e.error;
    if (e.report) je["report"] = detail::report_to_json(*e.report);
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);

  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = c.kind;
    jc["pass"] = c.pass;
    ordered_json idx = ordered_json::array();
    for (const auto& v : c.indices) idx.push_back(optional_int(v, "undetermined"));
    jc["indices"] = std::move(idx);
    if (!c.error.empty()) jc["error"] = c.error;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

std::string report_csv_text(const SuiteReport& report) {
  std::ostringstream out;
  out << "name,expected,consensus,agreed,pass\n";
  for (const auto& e : report.entries) {
    std::string name = e.entry.name;
    if (name.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
      name = quoted + "\"";
    }
    out << name << ',' << (e.entry.expected ? std::to_string(*e.entry.expected) : "unknown") << ',';
    if (e.report && e.report->consensus) {
      out << *e.report->consensus;
    } else {
      out << "undetermined";
    }
    out << ',' << ((e.report && e.report->agreed) ? "true" : "false") << ',' << (e.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit_report(const SuiteReport& report, const std::filesystem::path& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FredholmError(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << (format == ReportFormat::Json ? report_json_text(report, utc_timestamp()) : report_csv_text(report));
  out.flush();
  if (!out) throw FredholmError(ErrorKind::Io, "write failed for " + path.string());
}

SuiteSummary parse_summary_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& s = j.at("summary");
    return {s.at("total").get<std::size_t>(), s.at("passed").get<std::size_t>(), s.at("failed").get<std::size_t>(),
            s.at("errors").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw FredholmError(ErrorKind::Parse, std::string("malformed report: ") + e.what());
  }
}

std::vector<CorpusEntry> parse_corpus_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FredholmError(ErrorKind::Parse, std::string("corpus is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw FredholmError(ErrorKind::Parse, "corpus must be a JSON array of entries");
  if (j.empty()) throw FredholmError(ErrorKind::Parse, "corpus has no entries");

  std::vector<CorpusEntry> out;
  for (const auto& item : j) {
    try {
      CorpusEntry e{item.at("name").get<std::string>(), parse_operator_spec(item.at("spec").get<std::string>()),
                    std::nullopt, Provenance::Derived, {}, std::nullopt};
      const auto& expected = item.at("expected");
      if (expected.is_number_integer()) {
        e.expected = expected.get<int>();
      } else if (!(expected.is_string() && expected.get<std::string>() == "unknown")) {
        throw FredholmError(ErrorKind::Parse, "expected must be an integer or \"unknown\"");
      }
      if (item.contains("seed")) {
        e.seed = item.at("seed").get<std::uint64_t>();
        e.provenance = Provenance::Random;
      }
      if (item.contains("provenance")) e.provenance = parse_provenance(item.at("provenance").get<std::string>());
      if (item.contains("citation")) e.citation = item.at("citation").get<std::string>();
      if (e.provenance == Provenance::Literature && e.citation.empty()) {
        throw FredholmError(ErrorKind::Parse, "literature entry '" + e.name + "' needs a citation");
      }
      if (e.provenance == Provenance::Random && !e.seed) {
        throw FredholmError(ErrorKind::Parse, "random entry '" + e.name + "' needs a seed");
      }
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw FredholmError(ErrorKind::Parse, std::string("malformed corpus entry: ") + ex.what());
    }
  }
  return out;
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FredholmError(ErrorKind::Io, "cannot read corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_json(buf.str());
}

int zero_counting_winding(const Symbol& f, std::size_t points) {
  double total = 0.0;
  cplx prev{};
  for (std::size_t k = 0; k <= points; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k % points) / static_cast<double>(points);
    cplx v{0.0, 0.0};
    for (int m = f.min_mode(); m <= f.max_mode(); ++m) v += f.coeff(m) * std::polar(1.0, m * theta);
    if (k > 0) total += std::arg(v / prev);
    prev = v;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

Symbol random_certified_symbol(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lo_dist(-3, 0);
  std::uniform_int_distribution<int> hi_dist(0, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const UnitCircleGrid grid(1024);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const int lo = lo_dist(rng);
    const int hi = hi_dist(rng);
    if (hi == lo) continue;
    std::vector<cplx> c(static_cast<std::size_t>(hi - lo + 1));
    for (auto& x : c) x = {coeff(rng), coeff(rng)};
    if (c.front() == cplx{0.0, 0.0} || c.back() == cplx{0.0, 0.0}) continue;
    const Symbol f(std::move(c), lo);
    if (!(invertibility_margin(f, grid) > 0.1)) continue;
    if (!(reciprocal_coeffs(f, 64, grid).tail_estimate < kSeriesTailLimit)) continue;
    return f;
  }
  throw FredholmError(ErrorKind::Convergence, "rejection sampling found no certified symbol");
}

std::vector<CorpusEntry> random_symbol_corpus(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusEntry> out;
  for (std::size_t i = 0; i < count; ++i) {
    const Symbol f = random_certified_symbol(rng);
    out.push_back({"random-" + std::to_string(seed) + "-" + std::to_string(i), OperatorSpec::toeplitz(f),
                   -zero_counting_winding(f), Provenance::Random, {}, seed});
  }
  return out;
}

PerturbationSpec random_perturbation(std::mt19937_64& rng, std::size_t rank, std::size_t support) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::vector<PerturbationTerm> terms;
  for (std::size_t r = 0; r < rank; ++r) {
    std::vector<cplx> u(support), v(support);
    for (auto& x : u) x = {entry(rng), entry(rng)};
    for (auto& x : v) x = {entry(rng), entry(rng)};
    for (std::size_t i = 0; i < support; ++i) {
      for (std::size_t j = 0; j < support; ++j) terms.push_back({i, j, u[i] * std::conj(v[j])});
    }
  }
  return PerturbationSpec(std::move(terms));
}

SuiteReport run_selftest(std::uint64_t seed, const SuiteConfig& config) {
  std::mt19937_64 rng(seed);
  const std::string shift_cite = "unilateral shift: dim ker S - dim ker S* = 0 - 1 = -1";
  const std::string toeplitz_cite = "Toeplitz index theorem: index(T_f) = -wind(f)";
  const std::string vacuum_cite = "lambda I + K = lambda (I + K / lambda) has index 0 for lambda != 0";

  std::vector<CorpusEntry> corpus;
  corpus.push_back({"shift", OperatorSpec::shift(), -1, Provenance::Literature, shift_cite, std::nullopt});
  corpus.push_back({"adjoint shift", OperatorSpec::adjoint_shift(), 1, Provenance::Literature, shift_cite,
                    std::nullopt});
  for (int k : {1, -1, 2, -2}) {
    corpus.push_back({"toeplitz z^" + std::to_string(k), OperatorSpec::toeplitz(Symbol::monomial(k)), -k,
                      Provenance::Literature, toeplitz_cite, std::nullopt});
  }
  corpus.push_back({"identity", OperatorSpec::scalar_plus_compact(1.0), 0, Provenance::Literature, vacuum_cite,
                    std::nullopt});
  for (const cplx lambda : {cplx(1.0, 0.0), cplx(2.0, 1.0), cplx(-3.0, 0.0)}) {
    corpus.push_back({"scalar " + format_number(lambda.real()) + "," + format_number(lambda.imag()) + " + K",
                      OperatorSpec::scalar_plus_compact(lambda, random_perturbation(rng, 2, 6)), 0,
                      Provenance::Literature, vacuum_cite, seed});
  }

  SuiteReport report = run_corpus(corpus, config);
  report.config.seed = seed;

  const UnitCircleGrid grid(config.grid_size);
  const auto run_check = [&](std::string name, std::string kind, auto&& body) {
    CheckResult c{std::move(name), std::move(kind), false, {}, {}};
    try {
      body(c);
    } catch (const std::exception& e) {
      c.error = e.what();
      c.pass = false;
    }
    report.checks.push_back(std::move(c));
  };

  const std::pair<Symbol, Symbol> paths[] = {
      {Symbol::monomial(1), Symbol::monomial(1, 2.0)},
      {Symbol::affine(0.5, 1.0), Symbol::affine(0.9, 1.0)},
  };
  for (const auto& [from, to] : paths) {
    run_check("path " + format_symbol(from) + " -> " + format_symbol(to), "homotopy", [&](CheckResult& c) {
      const HomotopyOutcome h = homotopy_suite({from, to, 10}, config.ladder, grid);
      for (int v : h.indices) c.indices.push_back(v);
      c.pass = h.pass;
    });
  }

  const auto perturbation_check = [&](const Symbol& f, std::vector<PerturbationSpec> ks) {
    run_check("perturbations of " + format_symbol(f), "compact_perturbation", [&](CheckResult& c) {
      const PerturbationOutcome p = perturbation_suite(f, ks, config.ladder, grid, config.series_bandwidth);
      c.indices.push_back(p.base_index);
      c.indices.insert(c.indices.end(), p.perturbed_indices.begin(), p.perturbed_indices.end());
      c.pass = p.pass;
    });
  };
  perturbation_check(Symbol::monomial(1), {PerturbationSpec({{0, 0, 1.0}}), random_perturbation(rng, 1, 4)});
  perturbation_check(Symbol::affine(0.5, 1.0), {random_perturbation(rng, 2, 6)});

  summarize(report);
  return report;
}

}  // namespace fredholm
