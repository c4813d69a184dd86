#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oscil/functional.hpp"

using namespace oscil;
using namespace oscil::functional;
using oracle::pi;

namespace {

const auto kBiharmonic = oracle::coeffs("1", "1", "0");

AdmissibleFunction poly(std::vector<double> c, double b, BoundaryClass cls = BoundaryClass::focal) {
  return AdmissibleFunction::polynomial(std::move(c), 0.0, b, cls);
}

Problem<expr::CoefficientSet> problem(const char* r, const char* p, const char* q, double x_max) {
  return {0.0, oracle::coeffs(r, p, q), x_max};
}

}  // namespace

TEST(QuadraticForms, FourthOrderExamples) {
  EXPECT_NEAR(quadratic_form_I4(kBiharmonic, poly({0.0, 1.0, -0.5}, 1.0), 0.0, 1.0), 13.0 / 15.0, 1e-9);
  const AdmissibleFunction s([](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
                             [](double x) { return -std::sin(x); }, 0.0, pi / 2, BoundaryClass::focal);
  EXPECT_NEAR(quadratic_form_I4(kBiharmonic, s, 0.0, pi / 2), 0.0, 1e-8);
  EXPECT_THROW(quadratic_form_I4(kBiharmonic, poly({0.0}, 1.0), 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(quadratic_form_I4(kBiharmonic, poly({0.0, 1.0}, 1.0, BoundaryClass::free), 0.0, 1.0),
               InvalidArgument);
}

TEST(QuadraticForms, SecondOrderExamples) {
  EXPECT_NEAR(quadratic_form_I2(kBiharmonic, poly({0.0, 1.0}, 1.0, BoundaryClass::free), 0.0, 1.0), 1.0, 1e-13);
  const auto neg = oracle::coeffs("1", "1", "-1");
  EXPECT_NEAR(quadratic_form_I2(neg, poly({1.0}, 1.0, BoundaryClass::free), 0.0, 1.0), -1.0, 1e-13);
  EXPECT_NEAR(quadratic_form_I2(neg, poly({0.0, 1.0}, 1.0, BoundaryClass::free), 0.0, 1.0), 2.0 / 3.0, 1e-10);
  EXPECT_THROW(quadratic_form_I2(neg, poly({0.0}, 1.0, BoundaryClass::free), 0.0, 1.0), InvalidArgument);
}

TEST(Positivity, ConstantPotentials) {
  const auto weak = condition_quadform_positive(kBiharmonic, 0.0, 2.0);
  EXPECT_EQ(weak.verdict, Positivity::weak);
  EXPECT_NEAR(weak.witness.value, 0.0, 1e-12);
  const auto strict = condition_quadform_positive(oracle::coeffs("1", "1", "1"), 0.0, 2.0);
  EXPECT_EQ(strict.verdict, Positivity::strict);
  EXPECT_NEAR(strict.witness.value, 1.0, 1e-9);
  const auto fails = condition_quadform_positive(oracle::coeffs("1", "1", "-1"), 0.0, 2.0);
  EXPECT_EQ(fails.verdict, Positivity::fails);
  EXPECT_NEAR(fails.witness.value, -1.0, 1e-9);
}

TEST(Positivity, FailureHasNegativeWitness) {
  for (const char* q : {"-1", "0.5-x", "-0.2+0.1*sin(3*x)"}) {
    const auto c = oracle::coeffs("1+0.2*x", "1+0.5*x", q);
    const double b = 3.0;
    const auto res = condition_quadform_positive(c, 0.0, b);
    ASSERT_EQ(res.verdict, Positivity::fails) << q;
    const auto w = neumann_eigenfunction(c, 0.0, b, res.witness.value);
    EXPECT_NEAR(w.d1(b), 0.0, 1e-8);
    EXPECT_LT(quadratic_form_I2(c, w, 0.0, b), 0.0) << q;
  }
}

TEST(Wirtinger, ClosedFormFocalProblem) {
  const auto below = wirtinger_check(kBiharmonic, 0.0, 1.0, 8);
  EXPECT_NEAR(below.min_quotient, 6.088, 1e-2);
  EXPECT_TRUE(below.holds);
  const auto above = wirtinger_check(kBiharmonic, 0.0, 2.0, 8);
  EXPECT_NEAR(above.min_quotient, 0.3805, 1e-3);
  EXPECT_FALSE(above.holds);
  EXPECT_THROW(wirtinger_check(kBiharmonic, 0.0, 1.0, 0), InvalidArgument);
  EXPECT_THROW(wirtinger_check(kBiharmonic, 0.0, 1.0, 1), InvalidArgument);
}

TEST(Wirtinger, AgreesWithShootingFromAbove) {
  for (const char* p : {"1", "16", "0.25"}) {
    const auto c = oracle::coeffs("1", p, "0.5");
    for (double b : {0.5, 1.0}) {
      const double lambda1 = eigen::focal_eigenvalue(c, 0.0, b, 1).value;
      const double mq = wirtinger_check(c, 0.0, b, 12).min_quotient;
      EXPECT_NEAR(mq, lambda1, 1e-2 * lambda1) << p << " " << b;
      EXPECT_GE(mq, lambda1 - 1e-8) << p << " " << b;
    }
  }
}

TEST(Wirtinger, MinimizerRealizesTheQuotient) {
  const auto c = oracle::coeffs("1+x", "2+sin(x)", "0.3*x");
  const double b = 1.7;
  const auto res = wirtinger_check(c, 0.0, b, 10);
  ASSERT_EQ(res.coefficients.size(), 11u);
  const auto w = wirtinger_minimizer(res, 0.0);
  EXPECT_NEAR(eigen::rayleigh_quotient(c, w, 0.0, b), res.min_quotient, 1e-9 * res.min_quotient);
  EXPECT_GE(res.min_quotient, eigen::focal_eigenvalue(c, 0.0, b, 1).value - 1e-8);
}

TEST(Wirtinger, PositiveFormWithoutConjugatePoint) {
  // Integral of q diverges to -infinity, yet no conjugate point on the window.
  for (const char* r : {"1+x^3", "exp(x)"}) {
    const auto pb = problem(r, "0.001", "-0.01", 20.0);
    ASSERT_FALSE(oscillation::systems_conjugate_point(pb)) << r;
    for (double b : {2.5, 5.0, 10.0}) {
      const auto res = wirtinger_check(pb.coeffs, 0.0, b, 10);
      EXPECT_GT(quadratic_form_I4(pb.coeffs, wirtinger_minimizer(res, 0.0), 0.0, b), 0.0) << r << " " << b;
      EXPECT_GT(quadratic_form_I4(pb.coeffs, poly({0.0, 1.0, -0.5 / b}, b), 0.0, b), 0.0) << r << " " << b;
    }
  }
}

TEST(Comparison, ScaledWeight) {
  const auto rep = comparison_check(problem("1", "16", "0", 8.0), problem("1", "1", "0", 8.0));
  ASSERT_TRUE(rep.focal.point && rep.focal.point0);
  EXPECT_NEAR(*rep.focal.point, pi / 4, 1e-6);
  EXPECT_NEAR(*rep.focal.point0, pi / 2, 1e-6);
  EXPECT_EQ(rep.focal.relation, Relation::less);
  EXPECT_EQ(rep.focal.outcome, Outcome::pass);
  ASSERT_TRUE(rep.conjugate.point && rep.conjugate.point0);
  EXPECT_NEAR(*rep.conjugate.point, pi / 2, 1e-6);
  EXPECT_NEAR(*rep.conjugate.point0, pi, 1e-6);
  EXPECT_EQ(rep.conjugate.outcome, Outcome::pass);
}

TEST(Comparison, IdenticalAndStiffer) {
  const auto same = comparison_check(problem("1+x", "2", "0.5", 10.0), problem("1+x", "2", "0.5", 10.0));
  EXPECT_EQ(same.focal.relation, Relation::equal);
  EXPECT_EQ(same.conjugate.relation, Relation::equal);

  const auto stiff = comparison_check(problem("1", "1", "0", 8.0), problem("16", "1", "0", 8.0));
  ASSERT_TRUE(stiff.conjugate.point && stiff.conjugate.point0);
  EXPECT_NEAR(*stiff.conjugate.point, pi, 1e-6);
  EXPECT_NEAR(*stiff.conjugate.point0, 2 * pi, 1e-6);
  EXPECT_EQ(stiff.conjugate.outcome, Outcome::pass);

  const auto beyond = comparison_check(problem("1", "1", "0", 4.0), problem("16", "1", "0", 4.0));
  EXPECT_EQ(beyond.conjugate.relation, Relation::less);
  EXPECT_FALSE(beyond.conjugate.point0);
}

TEST(Comparison, DominanceIsRequired) {
  EXPECT_THROW(comparison_check(problem("2", "1", "0", 4.0), problem("1", "1", "0", 4.0)), InvalidArgument);
  EXPECT_THROW(comparison_check(problem("1", "1", "0", 4.0), problem("1", "2", "0", 4.0)), InvalidArgument);
  EXPECT_THROW(comparison_check(problem("1", "1", "1", 4.0), problem("1", "1", "0", 4.0)), InvalidArgument);
}

TEST(Divergence, RuleApplication) {
  const auto both = divergence_criteria(oracle::coeffs("1", "1", "-1"), 0.0, {true, true, true});
  EXPECT_EQ(both.verdict, "systems-conjugate");
  EXPECT_EQ(both.criteria, (std::vector<std::string>{"divergent_q_and_p", "divergent_q_and_inverse_r"}));

  const auto inv_r = divergence_criteria(oracle::coeffs("1", "0.01", "-1"), 0.0, {true, false, true});
  EXPECT_EQ(inv_r.verdict, "systems-conjugate");
  EXPECT_EQ(inv_r.criteria, (std::vector<std::string>{"divergent_q_and_inverse_r"}));

  const auto none = divergence_criteria(kBiharmonic, 0.0, {false, true, true});
  EXPECT_EQ(none.verdict, "inconclusive");
  EXPECT_TRUE(none.criteria.empty());
}

TEST(Divergence, HeuristicPartialIntegrals) {
  const auto v = divergence_criteria(oracle::coeffs("1+x^2", "0.01", "-1"), 0.0, {true, false, false});
  EXPECT_NEAR(v.heuristic.x.back(), 1000.0, 1e-9);
  EXPECT_NEAR(v.heuristic.q.back(), -1000.0, 1e-8);
  EXPECT_NEAR(v.heuristic.p.back(), 10.0, 1e-10);
  EXPECT_NEAR(v.heuristic.inv_r.back(), std::atan(1000.0), 1e-8);
  EXPECT_TRUE(v.apparent.int_q_diverges_to_minus_inf);
  EXPECT_TRUE(v.apparent.int_p_diverges);
  EXPECT_FALSE(v.apparent.int_inv_r_diverges);
}

TEST(Divergence, ConjugateVerdictsAreRealized) {
  for (const char* p : {"1", "0.01"}) {
    const auto pb = problem("1", p, "-1", 50.0);
    const auto v = divergence_criteria(pb.coeffs, 0.0, {true, std::string(p) == "1", true});
    ASSERT_EQ(v.verdict, "systems-conjugate");
    EXPECT_TRUE(oscillation::systems_conjugate_point(pb)) << p;
  }
}
