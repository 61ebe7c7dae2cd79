#pragma once

// Finite sections of operators on l^2(N): Toeplitz operators, the unilateral
// shift and its adjoint, scalar-plus-finite-rank operators, perturbations and
// products. Also the polar phase and the defect operators of a parametrix.

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fredholm/symbol.hpp"

namespace fredholm {

using Matrix = Eigen::MatrixXcd;

struct TruncatedOperator {
  Matrix entries;
  std::string tag;

  Eigen::Index rows() const noexcept { return entries.rows(); }
  Eigen::Index cols() const noexcept { return entries.cols(); }
};

struct PerturbationTerm {
  std::size_t row = 0;
  std::size_t col = 0;
  cplx value{0.0, 0.0};

  friend bool operator==(const PerturbationTerm&, const PerturbationTerm&) = default;
};

/// A finitely supported matrix K on l^2(N), stored as (row, col, value) terms.
/// Repeated positions accumulate.
class PerturbationSpec {
 public:
  PerturbationSpec() = default;
  explicit PerturbationSpec(std::vector<PerturbationTerm> terms);

  std::span<const PerturbationTerm> terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  /// Largest row or column index touched; nullopt when empty.
  std::optional<std::size_t> max_index() const noexcept;
  /// Terms (col, row, conj(value)).
  PerturbationSpec adjoint() const;

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;

 private:
  std::vector<PerturbationTerm> terms_;
};

class OperatorSpec;

struct ToeplitzOp {
  Symbol symbol;
};
struct ShiftOp {};
struct AdjointShiftOp {};
struct ScalarPlusCompactOp {
  cplx lambda;
  PerturbationSpec compact;
};
struct PerturbedOp {
  std::shared_ptr<const OperatorSpec> base;
  PerturbationSpec compact;
};
struct ProductOp {
  std::vector<OperatorSpec> factors;
};

/// Constructive description of an operator; produces truncations of any size.
class OperatorSpec {
 public:
  using Variant = std::variant<ToeplitzOp, ShiftOp, AdjointShiftOp, ScalarPlusCompactOp, PerturbedOp, ProductOp>;

  static OperatorSpec toeplitz(Symbol f);
  static OperatorSpec shift();
  static OperatorSpec adjoint_shift();
  static OperatorSpec scalar_plus_compact(cplx lambda, PerturbationSpec compact = {});
  static OperatorSpec perturbed(OperatorSpec base, PerturbationSpec compact);
  /// Throws FredholmError(Precondition) on an empty factor list.
  static OperatorSpec product(std::vector<OperatorSpec> factors);

  const Variant& variant() const noexcept { return v_; }

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&v_);
  }

 private:
  explicit OperatorSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// A[j, k] = c_{j-k}, the (rows x cols) section of T_f.
TruncatedOperator toeplitz_truncation(const Symbol& f, std::size_t rows, std::size_t cols);

/// Square compression P_n T P_n. Products multiply the member truncations.
/// Throws FredholmError(TruncationTooSmall) when n does not exceed the
/// support of some perturbation.
TruncatedOperator realize(const OperatorSpec& spec, std::size_t n);

/// The (n + buffer) x n section: T restricted to span(e_0..e_{n-1}). For banded
/// members with buffer >= their lower bandwidth this is the exact restriction,
/// so kernel vectors of T that decay inside the window survive.
TruncatedOperator tall_section(const OperatorSpec& spec, std::size_t n, std::size_t buffer);

TruncatedOperator adjoint(const TruncatedOperator& op);
OperatorSpec adjoint(const OperatorSpec& spec);

/// Sum of member symbol bandwidths; 1 for the shifts, 0 for scalars.
int spec_bandwidth(const OperatorSpec& spec);
/// Largest perturbation index anywhere in the spec.
std::optional<std::size_t> spec_support(const OperatorSpec& spec);
/// The symbol when the spec is Toeplitz-like (Toeplitz, shifts, products of those).
std::optional<Symbol> spec_symbol(const OperatorSpec& spec);

struct PhaseResult {
  TruncatedOperator phase;
  TruncatedOperator kernel_projector;
  TruncatedOperator cokernel_projector;
  /// smallest singular value above tol * sigma_max, divided by tol * sigma_max
  double sv_gap = 0.0;
  bool ill_separated = false;  // sv_gap < 2
  Eigen::VectorXd singular_values;
};

/// Partial isometry U D V* from the SVD, D keeping singular values above
/// tol * sigma_max. Requires a square nonempty op and tol in (0, 1).
PhaseResult polar_phase(const TruncatedOperator& op, double tol);

struct DefectOperators {
  TruncatedOperator p;  // I - t s
  TruncatedOperator q;  // I - s t
};

DefectOperators defect_operators(const TruncatedOperator& t, const TruncatedOperator& s);

}  // namespace fredholm
