#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "expr_generators.hpp"
#include "oscil/expr.hpp"

using namespace oscil;
using namespace oscil::expr;

namespace {

double eval(const std::string& s, double x) { return Expression::parse(s)(x); }

std::size_t error_position(const std::string& s) {
  try {
    Expression::parse(s);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no parse error for '" << s << "'";
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST(Expr, LiteralIsConstantNode) {
  const Expression e = Expression::parse("1");
  ASSERT_TRUE(std::holds_alternative<Constant>(e.root().kind));
  EXPECT_EQ(std::get<Constant>(e.root().kind).value, 1.0);
}

TEST(Expr, ProductOfCallsTree) {
  const Expression e = Expression::parse("sin(x)*exp(-x)");
  const auto expected = make_binary(BinaryOp::mul, make_call(Function::sin, make_variable()),
                                    make_call(Function::exp, make_negate(make_variable())));
  EXPECT_TRUE(same_tree(e.root(), *expected));
}

TEST(Expr, Evaluation) {
  EXPECT_EQ(eval("x^2", 3), 9.0);
  EXPECT_EQ(eval("sin(x)", 0), 0.0);
  EXPECT_NEAR(eval("exp(x)", 1), 2.718281828459045, 1e-15);
  EXPECT_EQ(eval("2+3*4", 0), 14.0);
  EXPECT_EQ(eval("2^3^2", 0), 512.0);
  EXPECT_EQ(eval("-x^2", 3), -9.0);
  EXPECT_EQ(eval("-2*3", 0), -6.0);
  EXPECT_EQ(eval("2^-1", 0), 0.5);
  EXPECT_EQ(eval("10/4/5", 0), 0.5);
  EXPECT_EQ(eval("1-2-3", 0), -4.0);
  EXPECT_NEAR(eval("1.5e-3 * 2E2", 0), 0.3, 1e-15);
  EXPECT_EQ(eval("  abs( -x )  ", 2), 2.0);
  EXPECT_NEAR(eval("sqrt(x)+log(x)+cosh(x)-sinh(x)+tanh(x)+tan(x)+cos(x)", 1.0),
              1 + 0 + std::exp(-1.0) + std::tanh(1.0) + std::tan(1.0) + std::cos(1.0), 1e-14);
}

TEST(Expr, SyntaxErrorsArePositioned) {
  EXPECT_EQ(error_position("2^("), 3u);
  EXPECT_EQ(error_position("2x"), 1u);
  EXPECT_EQ(error_position(""), 0u);
  EXPECT_EQ(error_position("(1+2"), 4u);
  EXPECT_EQ(error_position("1+*2"), 2u);
  EXPECT_EQ(error_position("sin x"), 4u);
  EXPECT_EQ(error_position("3 $ 4"), 2u);
  EXPECT_EQ(error_position("1e"), 1u);
  EXPECT_EQ(error_position("1e999"), 0u);
  EXPECT_EQ(error_position("+1"), 0u);
}

TEST(Expr, UnknownIdentifier) {
  try {
    Expression::parse("1 + y");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
    EXPECT_NE(std::string(e.what()).find("unknown identifier 'y'"), std::string::npos);
  }
  EXPECT_THROW(Expression::parse("foo(x)"), ParseError);
}

TEST(Expr, DomainErrorsIdentifyX) {
  try {
    eval("log(x)", -1.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.x(), -1.0);
  }
  EXPECT_THROW(eval("1/x", 0.0), DomainError);
  EXPECT_THROW(eval("sqrt(x)", -0.5), DomainError);
  EXPECT_THROW(eval("exp(x)", 1000.0), DomainError);
  EXPECT_THROW(eval("x^0.5", -2.0), DomainError);
  EXPECT_THROW(eval("0^(-1)", 0.0), DomainError);
}

TEST(Expr, CoefficientPositivityEnforcedAtEvaluation) {
  const CoefficientSet c = CoefficientSet::parse("1", "-1", "0");
  EXPECT_EQ(c.r(0.5), 1.0);
  EXPECT_EQ(c.q(0.5), 0.0);
  try {
    c.p(0.25);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("p(x) <= 0"), std::string::npos);
    EXPECT_EQ(e.x(), 0.25);
  }
  EXPECT_THROW(CoefficientSet::parse("x", "1", "0").r(0.0), DomainError);
}

using expr_generators::flat_oracle;
using expr_generators::random_tree;

TEST(ExprProperty, PrecedenceMatchesOracle) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> num(1, 9);
  std::uniform_int_distribution<int> opi(0, 4);
  const char ops[] = {'+', '-', '*', '/', '^'};
  for (int c = 0; c < 300; ++c) {
    std::vector<double> n{double(num(rng)), double(num(rng) % 3 + 1), double(num(rng) % 3 + 1)};
    std::vector<char> op{ops[opi(rng)], ops[opi(rng)]};
    const std::string src = std::to_string(int(n[0])) + op[0] + std::to_string(int(n[1])) + op[1] +
                            std::to_string(int(n[2]));
    EXPECT_DOUBLE_EQ(eval(src, 0.0), flat_oracle(n, op)) << src;
  }
}

TEST(ExprProperty, RoundTripIsStableAndEvaluatesIdentically) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  for (int c = 0; c < 250; ++c) {
    const Expression e(random_tree(rng, 5));
    const std::string text = e.canonical();
    const Expression back = Expression::parse(text);
    ASSERT_TRUE(back == e) << text;
    ASSERT_EQ(back.canonical(), text);
    for (int i = 0; i < 100; ++i) {
      const double x = xs(rng);
      bool e_threw = false, b_threw = false;
      double ve = 0, vb = 0;
      try { ve = e(x); } catch (const DomainError&) { e_threw = true; }
      try { vb = back(x); } catch (const DomainError&) { b_threw = true; }
      ASSERT_EQ(e_threw, b_threw) << text << " at " << x;
      if (!e_threw) {
        ASSERT_TRUE(std::isfinite(ve));
        ASSERT_EQ(ve, vb) << text << " at " << x;
      }
    }
  }
}

TEST(ExprProperty, UserTextRoundTrips) {
  for (const char* s : {"1+x^2", "sin(x)*exp(-x)", "-x^2", "2^3^2", "(1+x)/(2-x)", "1e-3*cosh(x/2)"}) {
    const Expression e = Expression::parse(s);
    EXPECT_TRUE(Expression::parse(e.canonical()) == e) << s;
    EXPECT_EQ(e.source(), s);
  }
}
