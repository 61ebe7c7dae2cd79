#include "fredholm/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fredholm/error.hpp"
#include "fredholm/text_format.hpp"

namespace fredholm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integer power of a unit-modulus grid point by index arithmetic, so z^m is
// the exact grid point rather than an accumulated product.
std::size_t power_index(std::size_t k, long long m, std::size_t count) {
  const auto K = static_cast<long long>(count);
  long long idx = (static_cast<long long>(k) * (m % K)) % K;
  if (idx < 0) idx += K;
  return static_cast<std::size_t>(idx);
}

std::vector<cplx> evaluate_derivative(const Symbol& f, const UnitCircleGrid& grid) {
  std::vector<cplx> out(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) out[k] = f.derivative(grid[k]);
  return out;
}

double margin_of(std::span<const cplx> values) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : values) m = std::min(m, std::abs(v));
  return m;
}

void require_invertible(const Symbol& f, double margin, std::size_t grid_count) {
  if (!(margin > kMarginFloor * f.l1_norm())) {
    throw FredholmError(ErrorKind::NotFredholm,
                        "symbol vanishes on the unit circle (margin " + format_number(margin) +
                            " on a " + std::to_string(grid_count) + "-point grid)");
  }
}

}  // namespace

Symbol::Symbol(std::vector<cplx> coeffs, int min_mode) {
  auto nonzero = [](const cplx& c) { return c != cplx{0.0, 0.0}; };
  auto first = std::find_if(coeffs.begin(), coeffs.end(), nonzero);
  if (first == coeffs.end()) {
    throw FredholmError(ErrorKind::InvalidSymbol, "all coefficients are zero");
  }
  auto last = std::find_if(coeffs.rbegin(), coeffs.rend(), nonzero).base();
  for (auto it = first; it != last; ++it) {
    if (!std::isfinite(it->real()) || !std::isfinite(it->imag())) {
      throw FredholmError(ErrorKind::InvalidSymbol, "non-finite coefficient");
    }
  }
  min_mode_ = min_mode + static_cast<int>(first - coeffs.begin());
  coeffs_.assign(first, last);
}

Symbol Symbol::monomial(int power, cplx coefficient) { return Symbol({coefficient}, power); }

Symbol Symbol::affine(cplx a, cplx b) { return Symbol({a, b}, 0); }

int Symbol::bandwidth() const noexcept { return std::max(std::abs(min_mode()), std::abs(max_mode())); }

cplx Symbol::coeff(int m) const noexcept {
  if (m < min_mode() || m > max_mode()) return {0.0, 0.0};
  return coeffs_[static_cast<std::size_t>(m - min_mode_)];
}

cplx Symbol::operator()(cplx z) const noexcept {
  // Horner in z on the polynomial part, then the z^{min_mode} prefactor.
  cplx acc{0.0, 0.0};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc * std::pow(z, min_mode_);
}

cplx Symbol::derivative(cplx z) const noexcept {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const int m = min_mode_ + static_cast<int>(i);
    if (m != 0) acc += static_cast<double>(m) * coeffs_[i] * std::pow(z, m - 1);
  }
  return acc;
}

double Symbol::l1_norm() const noexcept {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::abs(c);
  return s;
}

Symbol make_symbol(std::vector<cplx> coeffs, int min_mode) { return Symbol(std::move(coeffs), min_mode); }

UnitCircleGrid::UnitCircleGrid(std::size_t count) {
  if (count == 0) throw FredholmError(ErrorKind::Precondition, "grid needs at least one point");
  points_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    if ((4 * k) % count == 0) {
      // quarter turns are exact
      static constexpr cplx quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      points_[k] = quarter[(4 * k / count) % 4];
    } else {
      points_[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(count));
    }
  }
}

UnitCircleGrid UnitCircleGrid::for_symbol(const Symbol& f, std::size_t min_count) {
  std::size_t k = 4;
  while (k < min_count) k *= 2;
  return UnitCircleGrid(k).adapted_to(f);
}

bool UnitCircleGrid::oversamples(const Symbol& f) const noexcept { return count() >= 4 * f.mode_count(); }

UnitCircleGrid UnitCircleGrid::adapted_to(const Symbol& f) const {
  const std::size_t needed = std::max(4 * f.mode_count(), 4 * (2 * static_cast<std::size_t>(f.bandwidth()) + 1));
  std::size_t k = count();
  while (k < needed) k *= 2;
  return k == count() ? *this : UnitCircleGrid(k);
}

std::vector<cplx> evaluate(const Symbol& f, const UnitCircleGrid& grid) {
  if (!grid.oversamples(f)) {
    throw FredholmError(ErrorKind::Precondition, "grid of " + std::to_string(grid.count()) +
                                                     " points does not oversample a symbol with " +
                                                     std::to_string(f.mode_count()) + " modes");
  }
  std::vector<cplx> out(grid.count(), cplx{0.0, 0.0});
  for (std::size_t k = 0; k < grid.count(); ++k) {
    cplx acc{0.0, 0.0};
    for (int m = f.min_mode(); m <= f.max_mode(); ++m) {
      acc += f.coeff(m) * grid[power_index(k, m, grid.count())];
    }
    out[k] = acc;
  }
  return out;
}

double invertibility_margin(const Symbol& f, const UnitCircleGrid& grid) { return margin_of(evaluate(f, grid)); }

bool is_invertible_on(const Symbol& f, const UnitCircleGrid& grid) {
  return invertibility_margin(f, grid) > kMarginFloor * f.l1_norm();
}

WindingResult winding_phase_unwrap(const Symbol& f, const UnitCircleGrid& grid) {
  UnitCircleGrid g = grid.adapted_to(f);
  for (int depth = 0;; ++depth) {
    const auto values = evaluate(f, g);
    const double margin = margin_of(values);
    require_invertible(f, margin, g.count());

    double total = 0.0;
    double worst_step = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const cplx& a = values[k];
      const cplx& b = values[(k + 1) % values.size()];
      const double step = std::arg(b * std::conj(a));
      worst_step = std::max(worst_step, std::abs(step));
      total += step;
    }
    if (worst_step < std::numbers::pi / 2) {
      WindingResult r;
      r.raw = total / kTwoPi;
      r.value = static_cast<int>(std::lround(r.raw));
      r.residual = std::abs(r.raw - r.value);
      r.margin = margin;
      r.grid_count = g.count();
      return r;
    }
    if (depth == kMaxRefinements) {
      throw FredholmError(ErrorKind::GridResolution,
                          "phase step " + format_number(worst_step) + " >= pi/2 after " +
                              std::to_string(kMaxRefinements) + " grid doublings (" + std::to_string(g.count()) +
                              " points)");
    }
    g = g.doubled();
  }
}

WindingResult winding_contour(const Symbol& f, const UnitCircleGrid& grid) {
  UnitCircleGrid g = grid.adapted_to(f);
  WindingResult r;
  for (int depth = 0;; ++depth) {
    const auto values = evaluate(f, g);
    const double margin = margin_of(values);
    require_invertible(f, margin, g.count());
    const auto derivs = evaluate_derivative(f, g);

    // dz = i z dtheta, so (1/2 pi i) * integral f'/f dz = mean of z f'(z)/f(z).
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < g.count(); ++k) acc += g[k] * derivs[k] / values[k];
    acc /= static_cast<double>(g.count());

    r.raw = acc.real();
    r.value = static_cast<int>(std::lround(acc.real()));
    r.residual = std::abs(acc - cplx(r.value, 0.0));
    r.margin = margin;
    r.grid_count = g.count();
    if (r.residual < 1e-9 || depth == kMaxRefinements) break;
    g = g.doubled();
  }
  if (r.residual >= kWindingResidualLimit) {
    throw FredholmError(ErrorKind::Convergence, "contour estimate " + format_number(r.raw) +
                                                    " is not near an integer (residual " +
                                                    format_number(r.residual) + ")");
  }
  return r;
}

std::vector<cplx> reciprocal_dft(const Symbol& f, int bandwidth, const UnitCircleGrid& grid) {
  if (bandwidth < 1) throw FredholmError(ErrorKind::Precondition, "bandwidth must be positive");
  const std::size_t needed = 4 * (2 * static_cast<std::size_t>(bandwidth) + 1);
  if (grid.count() < needed) {
    throw FredholmError(ErrorKind::Precondition, "reciprocal at bandwidth " + std::to_string(bandwidth) +
                                                     " needs a grid of at least " + std::to_string(needed) +
                                                     " points, got " + std::to_string(grid.count()));
  }
  const auto values = evaluate(f, grid);
  require_invertible(f, margin_of(values), grid.count());

  const std::size_t K = grid.count();
  std::vector<cplx> inv(K);
  for (std::size_t k = 0; k < K; ++k) inv[k] = 1.0 / values[k];

  std::vector<cplx> g(2 * static_cast<std::size_t>(bandwidth) + 1);
  for (int m = -bandwidth; m <= bandwidth; ++m) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < K; ++k) acc += inv[k] * grid[power_index(k, -m, K)];
    g[static_cast<std::size_t>(m + bandwidth)] = acc / static_cast<double>(K);
  }
  return g;
}

ReciprocalResult reciprocal_coeffs(const Symbol& f, int bandwidth, const UnitCircleGrid& grid) {
  auto g = reciprocal_dft(f, bandwidth, grid);
  const auto at = [&](int m) { return std::abs(g[static_cast<std::size_t>(m + bandwidth)]); };

  double tail = 0.0;
  for (int m : {bandwidth, bandwidth - 1}) tail = std::max({tail, at(m), at(-m)});

  double peak = 0.0;
  for (const auto& c : g) peak = std::max(peak, std::abs(c));
  for (auto& c : g) {
    if (std::abs(c) < 1e-15 * peak) c = {0.0, 0.0};
  }
  return {Symbol(std::move(g), -bandwidth), tail};
}

Symbol multiply(const Symbol& f, const Symbol& g) {
  std::vector<cplx> out(f.mode_count() + g.mode_count() - 1, cplx{0.0, 0.0});
  const auto a = f.coeffs();
  const auto b = g.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return Symbol(std::move(out), f.min_mode() + g.min_mode());
}

Symbol conjugate(const Symbol& f) {
  std::vector<cplx> out(f.coeffs().rbegin(), f.coeffs().rend());
  for (auto& c : out) c = std::conj(c);
  return Symbol(std::move(out), -f.max_mode());
}

Symbol tilde(const Symbol& f) {
  std::vector<cplx> out(f.coeffs().rbegin(), f.coeffs().rend());
  return Symbol(std::move(out), -f.max_mode());
}

namespace {

struct DenseCoeffs {
  int min_mode;
  std::vector<cplx> coeffs;
};

DenseCoeffs interpolate(const SymbolPath& path, double t) {
  const int lo = std::min(path.start.min_mode(), path.end.min_mode());
  const int hi = std::max(path.start.max_mode(), path.end.max_mode());
  DenseCoeffs d{lo, std::vector<cplx>(static_cast<std::size_t>(hi - lo + 1))};
  for (int m = lo; m <= hi; ++m) {
    d.coeffs[static_cast<std::size_t>(m - lo)] = (1.0 - t) * path.start.coeff(m) + t * path.end.coeff(m);
  }
  return d;
}

}  // namespace

double SymbolPath::parameter(std::size_t i) const {
  if (waypoints < 2) throw FredholmError(ErrorKind::Precondition, "a path needs at least 2 waypoints");
  if (i + 1 >= waypoints) return 1.0;
  return static_cast<double>(i) / static_cast<double>(waypoints - 1);
}

Symbol SymbolPath::waypoint(std::size_t i) const {
  auto d = interpolate(*this, parameter(i));
  return Symbol(std::move(d.coeffs), d.min_mode);
}

PathCheck path_check(const SymbolPath& path, const UnitCircleGrid& grid) {
  if (path.waypoints < 2) throw FredholmError(ErrorKind::Precondition, "a path needs at least 2 waypoints");
  const int lo = std::min(path.start.min_mode(), path.end.min_mode());
  const int hi = std::max(path.start.max_mode(), path.end.max_mode());
  // A dense stand-in with the full mode range sizes the grid for every waypoint.
  const Symbol envelope(std::vector<cplx>(static_cast<std::size_t>(hi - lo + 1), cplx{1.0, 0.0}), lo);
  const UnitCircleGrid g = grid.adapted_to(envelope);

  PathCheck out;
  out.accepted = true;
  out.margins.reserve(path.waypoints);
  for (std::size_t i = 0; i < path.waypoints; ++i) {
    const auto d = interpolate(path, path.parameter(i));
    double margin = std::numeric_limits<double>::infinity();
    double l1 = 0.0;
    for (const auto& c : d.coeffs) l1 += std::abs(c);
    for (std::size_t k = 0; k < g.count(); ++k) {
      cplx acc{0.0, 0.0};
      for (std::size_t j = 0; j < d.coeffs.size(); ++j) {
        acc += d.coeffs[j] * g[power_index(k, d.min_mode + static_cast<long long>(j), g.count())];
      }
      margin = std::min(margin, std::abs(acc));
    }
    if (l1 == 0.0) margin = 0.0;
    out.margins.push_back(margin);
    if (!(margin > kMarginFloor * l1)) out.accepted = false;
  }
  return out;
}

}  // namespace fredholm
