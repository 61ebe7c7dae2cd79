#pragma once

// Three independent routes to the Fredholm index of a Toeplitz operator:
//
//   topological   -wind(f), by phase unwrapping and by the contour integral
//   analytic      dim ker - dim coker, counted on tall finite sections
//   k-theoretic   tr(1 - T_g T_f) - tr(1 - T_f T_g) with g = 1/f, evaluated
//                 in the infinite model as sum_{m>=1} m (g_m f_{-m} - f_m g_{-m})
//
// plus the rule index(lambda I + K) = 0 for lambda != 0, and a dispatcher that
// reconciles the engines for any OperatorSpec.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fredholm/operator_lab.hpp"
#include "fredholm/symbol.hpp"

namespace fredholm {

enum class Engine {
  Topological,
  Analytic,
  KTheoretic,
  ScalarPlusCompactRule,
  MemberSum,  // products: sum of the factor indices
  BaseIndex,  // perturbations: index of the unperturbed operator
};

std::string_view engine_name(Engine e);

struct HistoryPoint {
  long long param = 0;  // truncation size or series bandwidth
  double raw = 0.0;

  friend bool operator==(const HistoryPoint&, const HistoryPoint&) = default;
};

struct IndexEstimate {
  Engine engine = Engine::Topological;
  std::optional<int> value;  // nullopt is "undetermined"
  double residual = 0.0;
  std::vector<HistoryPoint> history;
  std::string note;

  bool determined() const noexcept { return value.has_value(); }
};

inline constexpr int kDefaultSeriesBandwidth = 64;
inline constexpr std::size_t kDefaultGridSize = 1024;
inline constexpr double kSeriesTailLimit = 1e-10;
inline constexpr double kIndexResidualLimit = 0.25;

struct LadderConfig {
  std::vector<std::size_t> sizes{64, 128, 256, 512};
  /// Tall-section surplus rows; nullopt means twice the operator bandwidth.
  std::optional<std::size_t> buffer;
  double sv_tol = 1e-8;
  std::size_t stabilization = 3;

  /// Throws FredholmError(Precondition) on a non-increasing ladder,
  /// stabilization < 2, or a non-positive tolerance.
  void validate() const;
  std::size_t buffer_for(int bandwidth) const;
};

struct IndexReport {
  OperatorSpec spec;
  std::vector<IndexEstimate> estimates;
  bool agreed = false;
  std::optional<int> consensus;
};

struct Consensus {
  bool agreed = false;
  std::optional<int> value;
};

/// -wind(f) from both winding algorithms; undetermined if they disagree or
/// the contour estimate does not converge. Throws NotFredholm on zero margin.
IndexEstimate index_topological(const Symbol& f, const UnitCircleGrid& grid);

struct KernelCount {
  std::size_t dimension = 0;
  /// (sv_tol * sigma_max) / (smallest singular value above it); small is good.
  double separation = 0.0;
  /// Smallest singular value above the threshold, relative to sigma_max
  /// (infinity when every value is below it).
  double floor = std::numeric_limits<double>::infinity();
};

/// A ladder rung only counts toward stabilization if its singular-value floor
/// is at least this fraction of the previous rung's floor; a floor that keeps
/// falling is a kernel vector that has not split off yet.
inline constexpr double kFloorDecayLimit = 0.5;

/// Singular values <= sv_tol * sigma_max of a (tall) section.
KernelCount count_kernel(const TruncatedOperator& section, double sv_tol);

/// Kernel count of the (n + buffer) x n section of T_f. Requires buffer >= bandwidth(f).
std::size_t kernel_dimension(const Symbol& f, std::size_t n, std::size_t buffer, double sv_tol);

/// dim ker T - dim ker T* on tall sections along the ladder, declared once
/// `stabilization` consecutive rungs agree with non-decaying singular-value
/// floors.
IndexEstimate index_analytic(const Symbol& f, const LadderConfig& ladder);
IndexEstimate index_analytic(const OperatorSpec& spec, const LadderConfig& ladder);

/// Partial sums of the defect-trace series, one per bandwidth b = 1..B
/// (b-th entry uses reciprocal modes |m| <= b), with the matching tail estimates.
struct SeriesTrace {
  std::vector<cplx> partial_sums;
  std::vector<double> tails;
};

SeriesTrace defect_trace_series(const Symbol& f, int bandwidth, const UnitCircleGrid& grid);

/// Throws BandwidthInsufficient when the reciprocal tail is >= 1e-10, and
/// Convergence when the series is not within 0.25 of an integer.
IndexEstimate index_ktheoretic(const Symbol& f, int bandwidth, const UnitCircleGrid& grid);

/// 0 for lambda != 0; throws NotFredholm for lambda == 0.
IndexEstimate index_scalar_plus_compact(cplx lambda, const PerturbationSpec& compact);

IndexReport index_of_spec(const OperatorSpec& spec, const LadderConfig& ladder, const UnitCircleGrid& grid,
                          int series_bandwidth = kDefaultSeriesBandwidth);

/// Agreement among determined estimates; undetermined ones abstain.
Consensus reconcile(std::span<const IndexEstimate> estimates);

/// The report as JSON text {spec, engines, agreed, consensus}.
std::string to_json_text(const IndexReport& report, int indent = 2);

}  // namespace fredholm
