#include "fredholm/index_engines.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fredholm/error.hpp"
#include "fredholm/text_format.hpp"

namespace fredholm {

namespace {

IndexEstimate undetermined(Engine engine, std::string note) {
  IndexEstimate e;
  e.engine = engine;
  e.note = std::move(note);
  return e;
}

void require_fredholm_symbol(const Symbol& f, const UnitCircleGrid& grid) {
  const UnitCircleGrid g = grid.adapted_to(f);
  const double margin = invertibility_margin(f, g);
  if (!(margin > kMarginFloor * f.l1_norm())) {
    throw FredholmError(ErrorKind::NotFredholm, "symbol " + format_symbol(f) + " vanishes on the unit circle");
  }
}

struct RungCount {
  long long value = 0;
  double separation = 0.0;
  double floor = std::numeric_limits<double>::infinity();
};

RungCount combine(const KernelCount& ker, const KernelCount& coker) {
  return {static_cast<long long>(ker.dimension) - static_cast<long long>(coker.dimension),
          std::max(ker.separation, coker.separation), std::min(ker.floor, coker.floor)};
}

template <typename CountAt>
IndexEstimate run_ladder(const LadderConfig& ladder, CountAt count_at) {
  ladder.validate();
  IndexEstimate est;
  est.engine = Engine::Analytic;
  std::vector<double> separations;
  std::vector<double> floors;
  bool decaying = false;
  for (const std::size_t n : ladder.sizes) {
    const RungCount rung = count_at(n);
    est.history.push_back({static_cast<long long>(n), static_cast<double>(rung.value)});
    separations.push_back(rung.separation);
    floors.push_back(rung.floor);

    const std::size_t k = ladder.stabilization;
    if (est.history.size() < k) continue;
    const auto tail_begin = est.history.end() - static_cast<std::ptrdiff_t>(k);
    const bool equal = std::all_of(tail_begin, est.history.end(),
                                   [&](const HistoryPoint& h) { return h.raw == est.history.back().raw; });
    bool steady_floor = true;
    for (std::size_t i = floors.size() - k + 1; i < floors.size(); ++i) {
      if (floors[i] < kFloorDecayLimit * floors[i - 1]) steady_floor = false;
    }
    decaying = decaying || (equal && !steady_floor);
    if (!equal || !steady_floor) continue;

    est.residual = *std::max_element(separations.end() - static_cast<std::ptrdiff_t>(k), separations.end());
    if (est.residual < kIndexResidualLimit) {
      est.value = static_cast<int>(est.history.back().raw);
    } else {
      est.note = "singular values not separated from the tolerance";
    }
    return est;
  }
  est.residual = separations.empty() ? 0.0 : separations.back();
  est.note = decaying ? "a singular value is still decaying toward the tolerance at the largest size"
                      : "kernel counts did not stabilize over " + std::to_string(ladder.stabilization) +
                            " consecutive sizes";
  return est;
}

}  // namespace

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::Topological: return "topological";
    case Engine::Analytic: return "analytic";
    case Engine::KTheoretic: return "ktheoretic";
    case Engine::ScalarPlusCompactRule: return "scalar_plus_compact_rule";
    case Engine::MemberSum: return "member_sum";
    case Engine::BaseIndex: return "base_index";
  }
  return "unknown";
}

void LadderConfig::validate() const {
  if (sizes.empty()) throw FredholmError(ErrorKind::Precondition, "ladder needs at least one size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw FredholmError(ErrorKind::Precondition, "ladder sizes must be positive");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw FredholmError(ErrorKind::Precondition, "ladder sizes must be strictly increasing");
    }
  }
  if (stabilization < 2) throw FredholmError(ErrorKind::Precondition, "stabilization must be at least 2");
  if (!(sv_tol > 0.0) || !std::isfinite(sv_tol)) {
    throw FredholmError(ErrorKind::Precondition, "sv_tol must be positive");
  }
}

std::size_t LadderConfig::buffer_for(int bandwidth) const {
  return buffer.value_or(2 * static_cast<std::size_t>(std::max(bandwidth, 0)));
}

IndexEstimate index_topological(const Symbol& f, const UnitCircleGrid& grid) {
  require_fredholm_symbol(f, grid);
  const WindingResult unwrap = winding_phase_unwrap(f, grid);

  IndexEstimate est;
  est.engine = Engine::Topological;
  est.history.push_back({static_cast<long long>(unwrap.grid_count), -unwrap.raw});
  WindingResult contour;
  try {
    contour = winding_contour(f, grid);
  } catch (const FredholmError& e) {
    if (e.kind() != ErrorKind::Convergence) throw;
    est.residual = unwrap.residual;
    est.note = e.what();
    return est;
  }
  est.history.push_back({static_cast<long long>(contour.grid_count), -contour.raw});
  est.residual = std::max(unwrap.residual, contour.residual);
  if (unwrap.value == contour.value) {
    est.value = -unwrap.value;
  } else {
    est.note = "phase unwrap gives " + std::to_string(unwrap.value) + ", contour gives " +
               std::to_string(contour.value);
  }
  return est;
}

KernelCount count_kernel(const TruncatedOperator& section, double sv_tol) {
  KernelCount out;
  if (section.cols() == 0) return out;
  Eigen::BDCSVD<Matrix> svd(section.entries);
  const Eigen::VectorXd& sigma = svd.singularValues();
  // Eigen returns min(rows, cols) values; a wide section has extra kernel.
  const auto missing = static_cast<std::size_t>(std::max<Eigen::Index>(0, section.cols() - sigma.size()));
  const double threshold = sv_tol * (sigma.size() > 0 ? sigma(0) : 0.0);
  double smallest_above = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) <= threshold) {
      ++out.dimension;
    } else {
      smallest_above = std::min(smallest_above, sigma(i));
    }
  }
  out.dimension += missing;
  out.separation = std::isfinite(smallest_above) ? threshold / smallest_above : 0.0;
  if (std::isfinite(smallest_above)) out.floor = smallest_above / sigma(0);
  return out;
}

std::size_t kernel_dimension(const Symbol& f, std::size_t n, std::size_t buffer, double sv_tol) {
  if (buffer < static_cast<std::size_t>(f.bandwidth())) {
    throw FredholmError(ErrorKind::Precondition, "tall-section buffer " + std::to_string(buffer) +
                                                     " is below the symbol bandwidth " +
                                                     std::to_string(f.bandwidth()));
  }
  return count_kernel(toeplitz_truncation(f, n + buffer, n), sv_tol).dimension;
}

IndexEstimate index_analytic(const Symbol& f, const LadderConfig& ladder) {
  require_fredholm_symbol(f, UnitCircleGrid::for_symbol(f));
  const Symbol fbar = conjugate(f);
  const std::size_t buffer = std::max(ladder.buffer_for(f.bandwidth()), static_cast<std::size_t>(f.bandwidth()));
  return run_ladder(ladder, [&](std::size_t n) {
    return combine(count_kernel(toeplitz_truncation(f, n + buffer, n), ladder.sv_tol),
                   count_kernel(toeplitz_truncation(fbar, n + buffer, n), ladder.sv_tol));
  });
}

IndexEstimate index_analytic(const OperatorSpec& spec, const LadderConfig& ladder) {
  const OperatorSpec star = adjoint(spec);
  const std::size_t buffer = ladder.buffer_for(spec_bandwidth(spec));
  return run_ladder(ladder, [&](std::size_t n) {
    return combine(count_kernel(tall_section(spec, n, buffer), ladder.sv_tol),
                   count_kernel(tall_section(star, n, buffer), ladder.sv_tol));
  });
}

SeriesTrace defect_trace_series(const Symbol& f, int bandwidth, const UnitCircleGrid& grid) {
  const std::vector<cplx> g = reciprocal_dft(f, bandwidth, grid);
  const auto gm = [&](int m) { return g[static_cast<std::size_t>(m + bandwidth)]; };

  SeriesTrace trace;
  trace.partial_sums.reserve(static_cast<std::size_t>(bandwidth));
  trace.tails.reserve(static_cast<std::size_t>(bandwidth));
  cplx sum{0.0, 0.0};
  for (int m = 1; m <= bandwidth; ++m) {
    // m-th diagonal block: m (g_m f_{-m} - f_m g_{-m})
    sum += static_cast<double>(m) * (gm(m) * f.coeff(-m) - f.coeff(m) * gm(-m));
    trace.partial_sums.push_back(sum);
    trace.tails.push_back(std::max({std::abs(gm(m)), std::abs(gm(-m)), std::abs(gm(m - 1)), std::abs(gm(1 - m))}));
  }
  return trace;
}

IndexEstimate index_ktheoretic(const Symbol& f, int bandwidth, const UnitCircleGrid& grid) {
  require_fredholm_symbol(f, grid);
  const SeriesTrace trace = defect_trace_series(f, bandwidth, grid);
  const double tail = trace.tails.back();
  if (!(tail < kSeriesTailLimit)) {
    throw FredholmError(ErrorKind::BandwidthInsufficient,
                        "reciprocal tail " + format_number(tail) + " at bandwidth " + std::to_string(bandwidth) +
                            " is not below " + format_number(kSeriesTailLimit));
  }

  IndexEstimate est;
  est.engine = Engine::KTheoretic;
  for (std::size_t i = 0; i < trace.partial_sums.size(); ++i) {
    est.history.push_back({static_cast<long long>(i + 1), trace.partial_sums[i].real()});
  }
  const cplx total = trace.partial_sums.back();
  const int rounded = static_cast<int>(std::lround(total.real()));
  est.residual = std::abs(total - cplx(rounded, 0.0));
  if (est.residual >= kIndexResidualLimit) {
    throw FredholmError(ErrorKind::Convergence, "defect-trace series " + format_number(total.real()) +
                                                    " is not near an integer");
  }
  est.value = rounded;
  return est;
}

IndexEstimate index_scalar_plus_compact(cplx lambda, const PerturbationSpec& /*compact*/) {
  if (lambda == cplx{0.0, 0.0}) {
    throw FredholmError(ErrorKind::NotFredholm,
                        "a compact operator on an infinite-dimensional space is never Fredholm (lambda = 0)");
  }
  IndexEstimate est;
  est.engine = Engine::ScalarPlusCompactRule;
  est.value = 0;
  return est;
}

namespace {

void add_symbol_engines(IndexReport& report, const Symbol& f, const LadderConfig& ladder, const UnitCircleGrid& grid,
                        int series_bandwidth) {
  const UnitCircleGrid g = grid.adapted_to(f);
  report.estimates.push_back(index_topological(f, g));
  report.estimates.push_back(index_analytic(f, ladder));

  // The series needs a grid of 4 (2B + 1) points on top of oversampling f.
  std::size_t k = g.count();
  while (k < 4 * (2 * static_cast<std::size_t>(series_bandwidth) + 1)) k *= 2;
  try {
    report.estimates.push_back(index_ktheoretic(f, series_bandwidth, k == g.count() ? g : UnitCircleGrid(k)));
  } catch (const FredholmError& e) {
    if (e.kind() != ErrorKind::BandwidthInsufficient && e.kind() != ErrorKind::Convergence) throw;
    report.estimates.push_back(undetermined(Engine::KTheoretic, e.what()));
  }
}

IndexReport member_report(const OperatorSpec& member, std::size_t position, const LadderConfig& ladder,
                          const UnitCircleGrid& grid, int series_bandwidth) {
  try {
    return index_of_spec(member, ladder, grid, series_bandwidth);
  } catch (const FredholmError& e) {
    if (e.kind() != ErrorKind::NotFredholm) throw;
    throw FredholmError(ErrorKind::NotFredholm, "member " + std::to_string(position) + " (" +
                                                    format_operator_spec(member) + ") is not Fredholm: " + e.what());
  }
}

}  // namespace

IndexReport index_of_spec(const OperatorSpec& spec, const LadderConfig& ladder, const UnitCircleGrid& grid,
                          int series_bandwidth) {
  ladder.validate();
  IndexReport report{spec, {}, false, std::nullopt};

  if (spec.as<ToeplitzOp>() || spec.as<ShiftOp>() || spec.as<AdjointShiftOp>()) {
    add_symbol_engines(report, *spec_symbol(spec), ladder, grid, series_bandwidth);
  } else if (const auto* s = spec.as<ScalarPlusCompactOp>()) {
    report.estimates.push_back(index_scalar_plus_compact(s->lambda, s->compact));
    report.estimates.push_back(index_analytic(spec, ladder));
  } else if (const auto* p = spec.as<PerturbedOp>()) {
    const IndexReport base = member_report(*p->base, 0, ladder, grid, series_bandwidth);
    IndexEstimate est;
    est.engine = Engine::BaseIndex;
    if (base.agreed) {
      est.value = base.consensus;
    } else {
      est.note = "base operator has no consensus index";
    }
    report.estimates.push_back(std::move(est));
    report.estimates.push_back(index_analytic(spec, ladder));
  } else {
    const auto& prod = std::get<ProductOp>(spec.variant());
    IndexEstimate sum;
    sum.engine = Engine::MemberSum;
    int total = 0;
    bool complete = true;
    for (std::size_t i = 0; i < prod.factors.size(); ++i) {
      const IndexReport r = member_report(prod.factors[i], i, ladder, grid, series_bandwidth);
      if (r.agreed && r.consensus) {
        sum.history.push_back({static_cast<long long>(i), static_cast<double>(*r.consensus)});
        total += *r.consensus;
      } else {
        complete = false;
      }
    }
    if (complete) {
      sum.value = total;
    } else {
      sum.note = "a factor has no consensus index";
    }
    report.estimates.push_back(std::move(sum));
    if (const auto f = spec_symbol(spec)) report.estimates.push_back(index_topological(*f, grid.adapted_to(*f)));
    report.estimates.push_back(index_analytic(spec, ladder));
  }

  const Consensus c = reconcile(report.estimates);
  report.agreed = c.agreed;
  report.consensus = c.value;
  return report;
}

Consensus reconcile(std::span<const IndexEstimate> estimates) {
  if (estimates.empty()) throw FredholmError(ErrorKind::Precondition, "nothing to reconcile");
  std::optional<int> seen;
  for (const auto& e : estimates) {
    if (!e.value) continue;
    if (seen && *seen != *e.value) return {false, std::nullopt};
    seen = e.value;
  }
  return {seen.has_value(), seen};
}

}  // namespace fredholm
