#include "fredholm/text_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fredholm/error.hpp"

namespace fredholm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(std::string_view what, std::string_view token) {
  throw FredholmError(ErrorKind::Parse, std::string(what) + " at token '" + std::string(token) + "'");
}

double parse_real(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
    parse_fail("expected a real number", token);
  }
  return value;
}

template <typename Int>
Int parse_integer(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  Int value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    parse_fail("expected an integer", token);
  }
  return value;
}

// Splits on `sep` at bracket/paren depth zero.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') {
      if (--depth < 0) parse_fail("unbalanced bracket", s.substr(i));
    }
    if (c == sep && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (depth != 0) parse_fail("unbalanced bracket", s);
  out.push_back(s.substr(start));
  return out;
}

// "(a,b,c)(d,e,f)" or "[(a,b,c), (d,e,f)]" into the parenthesised groups' fields.
std::vector<std::vector<std::string_view>> parse_tuples(std::string_view text) {
  std::string_view s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') parse_fail("missing closing ']'", s);
    s = trim(s.substr(1, s.size() - 2));
  }
  std::vector<std::vector<std::string_view>> out;
  while (!s.empty()) {
    if (s.front() != '(') parse_fail("expected '('", s);
    const auto close = s.find(')');
    if (close == std::string_view::npos) parse_fail("missing ')'", s);
    const auto inner = s.substr(1, close - 1);
    std::vector<std::string_view> fields;
    for (auto f : split_top(inner, ',')) fields.push_back(trim(f));
    out.push_back(std::move(fields));
    s = trim(s.substr(close + 1));
    if (!s.empty() && (s.front() == ',' || s.front() == ';')) s = trim(s.substr(1));
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// Last "+K:" at depth zero, so a base spec may itself carry one.
std::size_t find_perturbation_marker(std::string_view s) {
  int depth = 0;
  std::size_t found = std::string_view::npos;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (depth == 0 && s.substr(i, 3) == "+K:") found = i;
  }
  return found;
}

std::pair<double, double> parse_pair(std::string_view body, std::string_view what) {
  const auto parts = split_top(body, ',');
  if (parts.size() != 2) parse_fail(std::string(what) + " expects two comma-separated numbers", body);
  return {parse_real(parts[0]), parse_real(parts[1])};
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

Symbol parse_symbol(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) parse_fail("empty symbol", text);
  if (s == "shift") return Symbol::monomial(1);
  if (starts_with(s, "zpow:")) return Symbol::monomial(parse_integer<int>(s.substr(5)));
  if (starts_with(s, "affine:")) {
    const auto [a, b] = parse_pair(s.substr(7), "affine");
    try {
      return Symbol::affine(a, b);
    } catch (const FredholmError& e) {
      parse_fail(e.what(), s);
    }
  }
  if (s.front() != '[' && s.front() != '(') parse_fail("unknown symbol form", s);

  std::map<int, cplx> modes;
  for (const auto& fields : parse_tuples(s)) {
    if (fields.size() != 3) parse_fail("symbol triples are (mode,re,im)", fields.empty() ? s : fields.front());
    modes[parse_integer<int>(fields[0])] += cplx(parse_real(fields[1]), parse_real(fields[2]));
  }
  if (modes.empty()) parse_fail("symbol needs at least one triple", s);
  const int lo = modes.begin()->first;
  const int hi = modes.rbegin()->first;
  std::vector<cplx> coeffs(static_cast<std::size_t>(hi - lo + 1), cplx{0.0, 0.0});
  for (const auto& [m, c] : modes) coeffs[static_cast<std::size_t>(m - lo)] = c;
  try {
    return Symbol(std::move(coeffs), lo);
  } catch (const FredholmError& e) {
    parse_fail(e.what(), s);
  }
}

std::string format_symbol(const Symbol& f) {
  if (f.mode_count() == 1 && f.coeff(f.min_mode()) == cplx{1.0, 0.0}) {
    return "zpow:" + std::to_string(f.min_mode());
  }
  const bool real = [&] {
    for (const auto& c : f.coeffs()) {
      if (c.imag() != 0.0) return false;
    }
    return true;
  }();
  if (real && f.min_mode() >= 0 && f.max_mode() <= 1) {
    return "affine:" + format_number(f.coeff(0).real()) + "," + format_number(f.coeff(1).real());
  }
  std::string out = "[";
  bool first = true;
  for (int m = f.min_mode(); m <= f.max_mode(); ++m) {
    const cplx c = f.coeff(m);
    if (c == cplx{0.0, 0.0}) continue;
    if (!first) out += ",";
    first = false;
    out += "(" + std::to_string(m) + "," + format_number(c.real()) + "," + format_number(c.imag()) + ")";
  }
  return out + "]";
}

PerturbationSpec parse_perturbation(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) parse_fail("empty perturbation", text);
  if (s == "0") return {};
  std::vector<PerturbationTerm> terms;
  for (const auto& fields : parse_tuples(s)) {
    if (fields.size() != 3 && fields.size() != 4) {
      parse_fail("perturbation terms are (row,col,re[,im])", fields.empty() ? s : fields.front());
    }
    const double im = fields.size() == 4 ? parse_real(fields[3]) : 0.0;
    terms.push_back({parse_integer<std::size_t>(fields[0]), parse_integer<std::size_t>(fields[1]),
                     cplx(parse_real(fields[2]), im)});
  }
  return PerturbationSpec(std::move(terms));
}

std::string format_perturbation(const PerturbationSpec& k) {
  std::string out = "[";
  bool first = true;
  for (const auto& t : k.terms()) {
    if (!first) out += ",";
    first = false;
    out += "(" + std::to_string(t.row) + "," + std::to_string(t.col) + "," + format_number(t.value.real()) + "," +
           format_number(t.value.imag()) + ")";
  }
  return out + "]";
}

OperatorSpec parse_operator_spec(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) parse_fail("empty operator spec", text);
  if (s == "shift") return OperatorSpec::shift();
  if (s == "shift*") return OperatorSpec::adjoint_shift();
  if (s == "identity") return OperatorSpec::scalar_plus_compact(1.0);
  if (starts_with(s, "toeplitz:")) return OperatorSpec::toeplitz(parse_symbol(s.substr(9)));
  if (starts_with(s, "scalar:")) {
    const auto body = s.substr(7);
    const auto marker = find_perturbation_marker(body);
    const auto [re, im] = parse_pair(body.substr(0, marker), "scalar");
    PerturbationSpec k;
    if (marker != std::string_view::npos) k = parse_perturbation(body.substr(marker + 3));
    return OperatorSpec::scalar_plus_compact(cplx(re, im), std::move(k));
  }
  if (starts_with(s, "perturb:")) {
    const auto body = s.substr(8);
    const auto marker = find_perturbation_marker(body);
    if (marker == std::string_view::npos) parse_fail("perturb needs '+K:<terms>'", body);
    return OperatorSpec::perturbed(parse_operator_spec(body.substr(0, marker)),
                                   parse_perturbation(body.substr(marker + 3)));
  }
  if (starts_with(s, "product:")) {
    const auto body = trim(s.substr(8));
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
      parse_fail("product expects [spec;spec;...]", body);
    }
    std::vector<OperatorSpec> factors;
    for (auto part : split_top(body.substr(1, body.size() - 2), ';')) {
      factors.push_back(parse_operator_spec(part));
    }
    return OperatorSpec::product(std::move(factors));
  }
  parse_fail("unknown operator form", s);
}

std::string format_operator_spec(const OperatorSpec& spec) {
  if (const auto* t = spec.as<ToeplitzOp>()) return "toeplitz:" + format_symbol(t->symbol);
  if (spec.as<ShiftOp>()) return "shift";
  if (spec.as<AdjointShiftOp>()) return "shift*";
  if (const auto* s = spec.as<ScalarPlusCompactOp>()) {
    std::string out = "scalar:" + format_number(s->lambda.real()) + "," + format_number(s->lambda.imag());
    if (!s->compact.empty()) out += "+K:" + format_perturbation(s->compact);
    return out;
  }
  if (const auto* p = spec.as<PerturbedOp>()) {
    return "perturb:" + format_operator_spec(*p->base) + "+K:" + format_perturbation(p->compact);
  }
  const auto& prod = std::get<ProductOp>(spec.variant());
  std::string out = "product:[";
  for (std::size_t i = 0; i < prod.factors.size(); ++i) {
    if (i) out += ";";
    out += format_operator_spec(prod.factors[i]);
  }
  return out + "]";
}

}  // namespace fredholm
