#pragma once

// Trigonometric-polynomial symbols on the unit circle and the two winding
// number algorithms (phase unwrapping and the contour integral of f'/f).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fredholm {

using cplx = std::complex<double>;

/// A finitely supported symbol f(z) = sum_{m=min_mode}^{max_mode} c_m z^m.
/// Leading and trailing zero coefficients are always trimmed, so the stored
/// range is tight and the symbol is never identically zero.
class Symbol {
 public:
  /// Throws FredholmError(InvalidSymbol) for an empty or all-zero list.
  Symbol(std::vector<cplx> coeffs, int min_mode);

  static Symbol monomial(int power, cplx coefficient = 1.0);
  static Symbol constant(cplx value) { return monomial(0, value); }
  /// a + b z
  static Symbol affine(cplx a, cplx b);

  int min_mode() const noexcept { return min_mode_; }
  int max_mode() const noexcept { return min_mode_ + static_cast<int>(coeffs_.size()) - 1; }
  std::size_t mode_count() const noexcept { return coeffs_.size(); }
  /// max(|min_mode|, |max_mode|): the band half-width of T_f.
  int bandwidth() const noexcept;

  /// Coefficient at mode m; zero outside the stored range.
  cplx coeff(int m) const noexcept;
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }

  cplx operator()(cplx z) const noexcept;
  /// f'(z) = sum m c_m z^{m-1}
  cplx derivative(cplx z) const noexcept;
  /// sum |c_m|, an upper bound for sup |f| on the circle.
  double l1_norm() const noexcept;

  friend bool operator==(const Symbol&, const Symbol&) = default;

 private:
  std::vector<cplx> coeffs_;
  int min_mode_ = 0;
};

Symbol make_symbol(std::vector<cplx> coeffs, int min_mode);

/// The K equispaced points exp(2 pi i k / K), k = 0..K-1.
class UnitCircleGrid {
 public:
  explicit UnitCircleGrid(std::size_t count);

  /// Smallest power-of-two grid of at least `min_count` points that also
  /// resolves the phase of `f` (see adapted_to).
  static UnitCircleGrid for_symbol(const Symbol& f, std::size_t min_count = 256);

  std::size_t count() const noexcept { return points_.size(); }
  std::span<const cplx> points() const noexcept { return points_; }
  cplx operator[](std::size_t k) const noexcept { return points_[k]; }

  /// K >= 4 * (number of modes of f).
  bool oversamples(const Symbol& f) const noexcept;
  /// This grid if it has K >= 4 * (2 * bandwidth(f) + 1) points, else the
  /// first doubling that does. Counting every mode in [-bandwidth, bandwidth]
  /// keeps sparse symbols such as z^k from aliasing to a constant.
  UnitCircleGrid adapted_to(const Symbol& f) const;
  UnitCircleGrid doubled() const { return UnitCircleGrid(2 * count()); }

 private:
  std::vector<cplx> points_;
};

struct WindingResult {
  int value = 0;
  double residual = 0.0;  // |raw - value|
  double margin = 0.0;    // min |f| over the grid actually used
  double raw = 0.0;
  std::size_t grid_count = 0;
};

/// Relative floor under which a sampled |f| counts as a zero on the circle.
inline constexpr double kMarginFloor = 1e-12;
/// Refinement doublings allowed to the winding algorithms.
inline constexpr int kMaxRefinements = 3;
/// Acceptance threshold for the contour estimate.
inline constexpr double kWindingResidualLimit = 0.25;

/// Throws FredholmError(Precondition) when the grid does not oversample f.
std::vector<cplx> evaluate(const Symbol& f, const UnitCircleGrid& grid);

double invertibility_margin(const Symbol& f, const UnitCircleGrid& grid);
/// margin > kMarginFloor * ||f||_1
bool is_invertible_on(const Symbol& f, const UnitCircleGrid& grid);

/// Sum of principal-branch phase increments between neighbouring samples.
/// Doubles the grid (at most kMaxRefinements times) until every step is
/// below pi/2.
WindingResult winding_phase_unwrap(const Symbol& f, const UnitCircleGrid& grid);

/// Trapezoid rule for (1/2 pi i) * contour integral of f'/f, with f' summed
/// from the coefficients. Refines up to kMaxRefinements times while the
/// estimate is not yet within 1e-9 of an integer.
WindingResult winding_contour(const Symbol& f, const UnitCircleGrid& grid);

struct ReciprocalResult {
  Symbol symbol;
  /// max |g_m| over |m| in {bandwidth, bandwidth - 1}
  double tail_estimate = 0.0;
};

/// Discrete Fourier coefficients of 1/f on the grid, kept on modes
/// [-bandwidth, bandwidth]. Coefficients below 1e-15 relative to the largest
/// one are rounding noise and are zeroed.
ReciprocalResult reciprocal_coeffs(const Symbol& f, int bandwidth, const UnitCircleGrid& grid);

/// Dense reciprocal coefficients g_m, m in [-bandwidth, bandwidth], index m + bandwidth.
/// Shared by reciprocal_coeffs and the defect-trace engine.
std::vector<cplx> reciprocal_dft(const Symbol& f, int bandwidth, const UnitCircleGrid& grid);

Symbol multiply(const Symbol& f, const Symbol& g);
/// Coefficients conj(c_{-m}): the symbol conj(f).
Symbol conjugate(const Symbol& f);
/// Coefficients c_{-m}: the symbol f(1/z).
Symbol tilde(const Symbol& f);

/// Linear interpolation in coefficient space between two symbols.
struct SymbolPath {
  Symbol start;
  Symbol end;
  std::size_t waypoints = 2;

  double parameter(std::size_t i) const;
  /// Throws FredholmError(InvalidSymbol) if the waypoint is identically zero.
  Symbol waypoint(std::size_t i) const;
};

struct PathCheck {
  bool accepted = false;
  std::vector<double> margins;
};

/// Requires waypoints >= 2. The grid is adapted to the union mode range.
PathCheck path_check(const SymbolPath& path, const UnitCircleGrid& grid);

}  // namespace fredholm
