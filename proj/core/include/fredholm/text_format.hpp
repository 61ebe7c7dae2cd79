#pragma once

// Textual forms shared by the CLI and corpus files.
//
// Symbols:
//   shift                      z
//   zpow:<k>                   z^k
//   affine:<a>,<b>             a + b z  (real a, b)
//   [(<m>,<re>,<im>), ...]     explicit coefficients; brackets optional
//
// Perturbations:
//   [(<row>,<col>,<re>[,<im>]), ...]   or [] for the zero operator
//
// Operators:
//   shift | shift* | identity
//   toeplitz:<symbol>
//   scalar:<re>,<im>[+K:<perturbation>]
//   perturb:<operator>+K:<perturbation>
//   product:[<operator>;<operator>;...]

#include <string>
#include <string_view>

#include "fredholm/operator_lab.hpp"
#include "fredholm/symbol.hpp"

namespace fredholm {

/// Shortest decimal that round-trips the double.
std::string format_number(double x);

Symbol parse_symbol(std::string_view text);
std::string format_symbol(const Symbol& f);

PerturbationSpec parse_perturbation(std::string_view text);
std::string format_perturbation(const PerturbationSpec& k);

/// Throws FredholmError(Parse) naming the offending token.
OperatorSpec parse_operator_spec(std::string_view text);
std::string format_operator_spec(const OperatorSpec& spec);

}  // namespace fredholm
