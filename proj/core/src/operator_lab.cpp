#include "fredholm/operator_lab.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <string>

#include "fredholm/error.hpp"
#include "fredholm/text_format.hpp"

namespace fredholm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void add_perturbation(Matrix& m, const PerturbationSpec& k) {
  for (const auto& t : k.terms()) {
    m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
  }
}

void require_fits(const OperatorSpec& spec, std::size_t n) {
  if (n == 0) throw FredholmError(ErrorKind::TruncationTooSmall, "truncation size must be positive");
  if (const auto s = spec_support(spec); s && *s >= n) {
    throw FredholmError(ErrorKind::TruncationTooSmall, "truncation size " + std::to_string(n) +
                                                           " does not exceed perturbation support index " +
                                                           std::to_string(*s));
  }
}

Matrix tall_matrix(const OperatorSpec& spec, std::size_t n, std::size_t buffer) {
  const auto rows = static_cast<Eigen::Index>(n + buffer);
  const auto cols = static_cast<Eigen::Index>(n);
  return std::visit(
      overloaded{
          [&](const ToeplitzOp& t) { return toeplitz_truncation(t.symbol, n + buffer, n).entries; },
          [&](const ShiftOp&) { return toeplitz_truncation(Symbol::monomial(1), n + buffer, n).entries; },
          [&](const AdjointShiftOp&) { return toeplitz_truncation(Symbol::monomial(-1), n + buffer, n).entries; },
          [&](const ScalarPlusCompactOp& s) {
            Matrix m = s.lambda * Matrix::Identity(rows, cols);
            add_perturbation(m, s.compact);
            return m;
          },
          [&](const PerturbedOp& p) {
            Matrix m = tall_matrix(*p.base, n, buffer);
            add_perturbation(m, p.compact);
            return m;
          },
          [&](const ProductOp& p) {
            // Right to left: each inner factor widens the window by twice its
            // bandwidth, the outermost factor takes whatever rows remain.
            std::size_t width = n;
            Matrix acc = Matrix::Identity(cols, cols);
            for (std::size_t i = p.factors.size(); i-- > 0;) {
              const auto& factor = p.factors[i];
              std::size_t grow = 2 * static_cast<std::size_t>(spec_bandwidth(factor));
              if (i == 0) {
                if (n + buffer < width) {
                  throw FredholmError(ErrorKind::Precondition, "tall-section buffer " + std::to_string(buffer) +
                                                                   " is smaller than the product bandwidth");
                }
                grow = n + buffer - width;
              }
              if (const auto s = spec_support(factor); s && *s >= width) {
                throw FredholmError(ErrorKind::TruncationTooSmall, "product factor support exceeds window");
              }
              acc = tall_matrix(factor, width, grow) * acc;
              width += grow;
            }
            return acc;
          },
      },
      spec.variant());
}

}  // namespace

PerturbationSpec::PerturbationSpec(std::vector<PerturbationTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!std::isfinite(t.value.real()) || !std::isfinite(t.value.imag())) {
      throw FredholmError(ErrorKind::Precondition, "perturbation entries must be finite");
    }
  }
}

std::optional<std::size_t> PerturbationSpec::max_index() const noexcept {
  if (terms_.empty()) return std::nullopt;
  std::size_t m = 0;
  for (const auto& t : terms_) m = std::max({m, t.row, t.col});
  return m;
}

PerturbationSpec PerturbationSpec::adjoint() const {
  std::vector<PerturbationTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({t.col, t.row, std::conj(t.value)});
  return PerturbationSpec(std::move(out));
}

OperatorSpec OperatorSpec::toeplitz(Symbol f) { return OperatorSpec(ToeplitzOp{std::move(f)}); }
OperatorSpec OperatorSpec::shift() { return OperatorSpec(ShiftOp{}); }
OperatorSpec OperatorSpec::adjoint_shift() { return OperatorSpec(AdjointShiftOp{}); }

OperatorSpec OperatorSpec::scalar_plus_compact(cplx lambda, PerturbationSpec compact) {
  return OperatorSpec(ScalarPlusCompactOp{lambda, std::move(compact)});
}

OperatorSpec OperatorSpec::perturbed(OperatorSpec base, PerturbationSpec compact) {
  return OperatorSpec(PerturbedOp{std::make_shared<const OperatorSpec>(std::move(base)), std::move(compact)});
}

OperatorSpec OperatorSpec::product(std::vector<OperatorSpec> factors) {
  if (factors.empty()) throw FredholmError(ErrorKind::Precondition, "product needs at least one factor");
  return OperatorSpec(ProductOp{std::move(factors)});
}

TruncatedOperator toeplitz_truncation(const Symbol& f, std::size_t rows, std::size_t cols) {
  TruncatedOperator op;
  op.entries = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (int m = f.min_mode(); m <= f.max_mode(); ++m) {
    const cplx c = f.coeff(m);
    if (c == cplx{0.0, 0.0}) continue;
    // entries with j - k = m
    for (long long k = std::max(0, -m); k < static_cast<long long>(cols); ++k) {
      const long long j = k + m;
      if (j >= static_cast<long long>(rows)) break;
      op.entries(j, k) = c;
    }
  }
  op.tag = "toeplitz:" + format_symbol(f) + " section " + std::to_string(rows) + "x" + std::to_string(cols);
  return op;
}

TruncatedOperator realize(const OperatorSpec& spec, std::size_t n) {
  require_fits(spec, n);
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix m = std::visit(
      overloaded{
          [&](const ToeplitzOp& t) { return toeplitz_truncation(t.symbol, n, n).entries; },
          [&](const ShiftOp&) { return toeplitz_truncation(Symbol::monomial(1), n, n).entries; },
          [&](const AdjointShiftOp&) { return toeplitz_truncation(Symbol::monomial(-1), n, n).entries; },
          [&](const ScalarPlusCompactOp& s) {
            Matrix out = s.lambda * Matrix::Identity(dim, dim);
            add_perturbation(out, s.compact);
            return out;
          },
          [&](const PerturbedOp& p) {
            Matrix out = realize(*p.base, n).entries;
            add_perturbation(out, p.compact);
            return out;
          },
          [&](const ProductOp& p) {
            Matrix out = Matrix::Identity(dim, dim);
            for (const auto& factor : p.factors) out = out * realize(factor, n).entries;
            return out;
          },
      },
      spec.variant());
  std::string tag = format_operator_spec(spec) + " section " + std::to_string(n) + "x" + std::to_string(n);
  if (spec.as<ProductOp>()) tag += " (product of sections)";
  return {std::move(m), std::move(tag)};
}

TruncatedOperator tall_section(const OperatorSpec& spec, std::size_t n, std::size_t buffer) {
  require_fits(spec, n);
  return {tall_matrix(spec, n, buffer), format_operator_spec(spec) + " tall section " + std::to_string(n + buffer) +
                                            "x" + std::to_string(n)};
}

TruncatedOperator adjoint(const TruncatedOperator& op) { return {op.entries.adjoint(), "adjoint of " + op.tag}; }

OperatorSpec adjoint(const OperatorSpec& spec) {
  return std::visit(overloaded{
                        [](const ToeplitzOp& t) { return OperatorSpec::toeplitz(conjugate(t.symbol)); },
                        [](const ShiftOp&) { return OperatorSpec::adjoint_shift(); },
                        [](const AdjointShiftOp&) { return OperatorSpec::shift(); },
                        [](const ScalarPlusCompactOp& s) {
                          return OperatorSpec::scalar_plus_compact(std::conj(s.lambda), s.compact.adjoint());
                        },
                        [](const PerturbedOp& p) {
                          return OperatorSpec::perturbed(adjoint(*p.base), p.compact.adjoint());
                        },
                        [](const ProductOp& p) {
                          std::vector<OperatorSpec> rev;
                          rev.reserve(p.factors.size());
                          for (auto it = p.factors.rbegin(); it != p.factors.rend(); ++it) rev.push_back(adjoint(*it));
                          return OperatorSpec::product(std::move(rev));
                        },
                    },
                    spec.variant());
}

int spec_bandwidth(const OperatorSpec& spec) {
  return std::visit(overloaded{
                        [](const ToeplitzOp& t) { return t.symbol.bandwidth(); },
                        [](const ShiftOp&) { return 1; },
                        [](const AdjointShiftOp&) { return 1; },
                        [](const ScalarPlusCompactOp&) { return 0; },
                        [](const PerturbedOp& p) { return spec_bandwidth(*p.base); },
                        [](const ProductOp& p) {
                          int s = 0;
                          for (const auto& f : p.factors) s += spec_bandwidth(f);
                          return s;
                        },
                    },
                    spec.variant());
}

std::optional<std::size_t> spec_support(const OperatorSpec& spec) {
  const auto merge = [](std::optional<std::size_t> a, std::optional<std::size_t> b) -> std::optional<std::size_t> {
    if (!a) return b;
    if (!b) return a;
    return std::max(*a, *b);
  };
  return std::visit(overloaded{
                        [](const ToeplitzOp&) -> std::optional<std::size_t> { return std::nullopt; },
                        [](const ShiftOp&) -> std::optional<std::size_t> { return std::nullopt; },
                        [](const AdjointShiftOp&) -> std::optional<std::size_t> { return std::nullopt; },
                        [](const ScalarPlusCompactOp& s) { return s.compact.max_index(); },
                        [&](const PerturbedOp& p) { return merge(spec_support(*p.base), p.compact.max_index()); },
                        [&](const ProductOp& p) {
                          std::optional<std::size_t> s;
                          for (const auto& f : p.factors) s = merge(s, spec_support(f));
                          return s;
                        },
                    },
                    spec.variant());
}

std::optional<Symbol> spec_symbol(const OperatorSpec& spec) {
  return std::visit(overloaded{
                        [](const ToeplitzOp& t) -> std::optional<Symbol> { return t.symbol; },
                        [](const ShiftOp&) -> std::optional<Symbol> { return Symbol::monomial(1); },
                        [](const AdjointShiftOp&) -> std::optional<Symbol> { return Symbol::monomial(-1); },
                        [](const ScalarPlusCompactOp&) -> std::optional<Symbol> { return std::nullopt; },
                        [](const PerturbedOp&) -> std::optional<Symbol> { return std::nullopt; },
                        [](const ProductOp& p) -> std::optional<Symbol> {
                          std::optional<Symbol> acc;
                          for (const auto& f : p.factors) {
                            auto s = spec_symbol(f);
                            if (!s) return std::nullopt;
                            acc = acc ? multiply(*acc, *s) : *s;
                          }
                          return acc;
                        },
                    },
                    spec.variant());
}

PhaseResult polar_phase(const TruncatedOperator& op, double tol) {
  if (op.rows() == 0 || op.cols() == 0) throw FredholmError(ErrorKind::EmptyOperator, "operator has size 0");
  if (op.rows() != op.cols()) {
    throw FredholmError(ErrorKind::Dimension, "polar phase needs a square operator, got " +
                                                  std::to_string(op.rows()) + "x" + std::to_string(op.cols()));
  }
  if (!(tol > 0.0 && tol < 1.0)) throw FredholmError(ErrorKind::Precondition, "phase tolerance must lie in (0, 1)");

  Eigen::BDCSVD<Matrix> svd(op.entries, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  const Eigen::Index n = op.rows();
  const double threshold = tol * sigma(0);

  Eigen::VectorXcd keep(n);
  Matrix ker = Matrix::Zero(n, n);
  Matrix coker = Matrix::Zero(n, n);
  double smallest_kept = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sigma(i) > threshold) {
      keep(i) = 1.0;
      smallest_kept = std::min(smallest_kept, sigma(i));
    } else {
      keep(i) = 0.0;
      ker += v.col(i) * v.col(i).adjoint();
      coker += u.col(i) * u.col(i).adjoint();
    }
  }

  PhaseResult r;
  r.phase = {u * keep.asDiagonal() * v.adjoint(), "phase of " + op.tag};
  r.kernel_projector = {std::move(ker), "kernel projector of " + op.tag};
  r.cokernel_projector = {std::move(coker), "cokernel projector of " + op.tag};
  r.sv_gap = threshold > 0.0 ? smallest_kept / threshold : std::numeric_limits<double>::infinity();
  r.ill_separated = r.sv_gap < 2.0;
  r.singular_values = sigma;
  return r;
}

DefectOperators defect_operators(const TruncatedOperator& t, const TruncatedOperator& s) {
  if (t.rows() != t.cols() || s.rows() != s.cols() || t.rows() != s.rows()) {
    throw FredholmError(ErrorKind::Dimension, "defect operators need square operators of equal size");
  }
  const Matrix id = Matrix::Identity(t.rows(), t.cols());
  return {{id - t.entries * s.entries, "I - TS"}, {id - s.entries * t.entries, "I - ST"}};
}

}  // namespace fredholm
