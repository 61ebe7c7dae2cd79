#include "fredholm/text_format.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fredholm/error.hpp"

namespace fredholm {
namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const FredholmError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no FredholmError thrown";
  return ErrorKind::Io;
}

TEST(ParseSymbol, Presets) {
  EXPECT_EQ(parse_symbol("shift"), Symbol::monomial(1));
  EXPECT_EQ(parse_symbol("zpow:-3"), Symbol::monomial(-3));
  EXPECT_EQ(parse_symbol("affine:0.5,1"), Symbol::affine(0.5, 1.0));
  EXPECT_EQ(parse_symbol("affine:1,0"), Symbol::constant(1.0));
}

TEST(ParseSymbol, Triples) {
  const Symbol f = parse_symbol("[(-1,2,0),(1,0,-1.5)]");
  EXPECT_EQ(f.min_mode(), -1);
  EXPECT_EQ(f.coeff(-1), cplx(2.0, 0.0));
  EXPECT_EQ(f.coeff(0), cplx(0.0));
  EXPECT_EQ(f.coeff(1), cplx(0.0, -1.5));
  EXPECT_EQ(parse_symbol(" (0, 1, 0) , (1,1,0) "), Symbol::affine(1.0, 1.0));
  // repeated modes accumulate
  EXPECT_EQ(parse_symbol("[(2,1,0),(2,1,0)]"), Symbol::monomial(2, 2.0));
}

TEST(ParseSymbol, ErrorsNameTheToken) {
  try {
    parse_symbol("affine:0,1+z");
    FAIL();
  } catch (const FredholmError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("1+z"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([] { parse_symbol("zpow:x"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_symbol("[(1,2)]"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_symbol("circle"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_symbol(""); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_symbol("affine:0,0"); }), ErrorKind::Parse);
}

TEST(ParsePerturbation, Forms) {
  EXPECT_TRUE(parse_perturbation("[]").empty());
  EXPECT_TRUE(parse_perturbation("0").empty());
  const auto k = parse_perturbation("[(0,0,-1),(2,1,0.5,2)]");
  ASSERT_EQ(k.terms().size(), 2u);
  EXPECT_EQ(k.terms()[0], (PerturbationTerm{0, 0, {-1.0, 0.0}}));
  EXPECT_EQ(k.terms()[1], (PerturbationTerm{2, 1, {0.5, 2.0}}));
  EXPECT_EQ(k.max_index(), std::optional<std::size_t>(2));
  EXPECT_EQ(kind_of([] { parse_perturbation("[(-1,0,1)]"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_perturbation("[(0,0)]"); }), ErrorKind::Parse);
}

TEST(ParseOperator, Variants) {
  EXPECT_NE(parse_operator_spec("shift").as<ShiftOp>(), nullptr);
  EXPECT_NE(parse_operator_spec("shift*").as<AdjointShiftOp>(), nullptr);

  const auto t = parse_operator_spec("toeplitz:affine:0.5,1");
  ASSERT_NE(t.as<ToeplitzOp>(), nullptr);
  EXPECT_EQ(t.as<ToeplitzOp>()->symbol, Symbol::affine(0.5, 1.0));

  const auto s = parse_operator_spec("scalar:2,1+K:[(0,0,-1)]");
  ASSERT_NE(s.as<ScalarPlusCompactOp>(), nullptr);
  EXPECT_EQ(s.as<ScalarPlusCompactOp>()->lambda, cplx(2.0, 1.0));
  EXPECT_EQ(s.as<ScalarPlusCompactOp>()->compact.terms().size(), 1u);

  const auto id = parse_operator_spec("identity");
  ASSERT_NE(id.as<ScalarPlusCompactOp>(), nullptr);
  EXPECT_EQ(id.as<ScalarPlusCompactOp>()->lambda, cplx(1.0));

  const auto p = parse_operator_spec("perturb:toeplitz:shift+K:[(0,0,1)]");
  ASSERT_NE(p.as<PerturbedOp>(), nullptr);
  EXPECT_NE(p.as<PerturbedOp>()->base->as<ToeplitzOp>(), nullptr);

  const auto prod = parse_operator_spec("product:[toeplitz:shift;shift*;scalar:1,0+K:[(1,1,2)]]");
  ASSERT_NE(prod.as<ProductOp>(), nullptr);
  EXPECT_EQ(prod.as<ProductOp>()->factors.size(), 3u);
}

TEST(ParseOperator, NestedPerturbationUsesLastMarker) {
  const auto p = parse_operator_spec("perturb:perturb:shift+K:[(0,0,1)]+K:[(1,1,2)]");
  ASSERT_NE(p.as<PerturbedOp>(), nullptr);
  EXPECT_EQ(p.as<PerturbedOp>()->compact.terms()[0].row, 1u);
  EXPECT_NE(p.as<PerturbedOp>()->base->as<PerturbedOp>(), nullptr);
}

TEST(ParseOperator, Malformed) {
  for (const char* bad : {"toeplitz:affine:0,1+z-modes", "shifty", "product:[]", "product:[shift;", "scalar:1",
                          "perturb:shift", "toeplitz:", "scalar:a,b"}) {
    EXPECT_EQ(kind_of([&] { parse_operator_spec(bad); }), ErrorKind::Parse) << bad;
  }
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(-3.0), "-3");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(FormatRoundTrip, SymbolsAndOperators) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> lo(-4, 0), len(1, 6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<cplx> c(static_cast<std::size_t>(len(rng)));
    for (auto& x : c) x = {u(rng), trial % 2 ? u(rng) : 0.0};
    const Symbol f(c, lo(rng));
    EXPECT_EQ(parse_symbol(format_symbol(f)), f) << format_symbol(f);
  }
  for (const char* text : {"shift", "shift*", "toeplitz:zpow:3", "toeplitz:affine:0.5,1", "scalar:2,1+K:[(0,0,-1)]",
                           "perturb:toeplitz:shift+K:[(0,0,1),(3,2,0.25,-1)]",
                           "product:[toeplitz:shift;shift*;toeplitz:[(-2,1,0),(0,0.5,0.5)]]"}) {
    const auto spec = parse_operator_spec(text);
    const std::string once = format_operator_spec(spec);
    EXPECT_EQ(format_operator_spec(parse_operator_spec(once)), once) << text;
  }
  EXPECT_EQ(format_symbol(Symbol::monomial(-2)), "zpow:-2");
  EXPECT_EQ(format_symbol(Symbol::affine(0.5, 1.0)), "affine:0.5,1");
}

}  // namespace
}  // namespace fredholm
