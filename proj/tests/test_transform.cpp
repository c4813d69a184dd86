#include <cmath>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oscil/transform.hpp"

using namespace oscil;
using namespace oscil::transform;
using oracle::pi;

namespace {

std::shared_ptr<const AuxiliarySolution> aux_of(const expr::CoefficientSet& c, double a, double x_max) {
  return std::make_shared<const AuxiliarySolution>(auxiliary_solution(c, a, x_max));
}

}  // namespace

TEST(Auxiliary, ConstantSolution) {
  const auto c = oracle::coeffs("1", "1", "0");
  const auto aux = auxiliary_solution(c, 0.0, 3.0);
  EXPECT_EQ(aux.h(0.0), 1.0);
  EXPECT_EQ(aux.w(0.0), 0.0);
  EXPECT_NEAR(aux.h(2.7), 1.0, 1e-14);
  EXPECT_FALSE(aux.first_zero());
  EXPECT_EQ(aux.positivity_end(), 3.0);
}

TEST(Auxiliary, CosineAndCosh) {
  const auto cosine = auxiliary_solution(oracle::coeffs("1", "1", "-1"), 0.0, 3.0);
  for (double x : {0.3, 1.0, 1.5, 2.5}) EXPECT_NEAR(cosine.h(x), std::cos(x), 1e-9);
  ASSERT_TRUE(cosine.first_zero());
  EXPECT_NEAR(cosine.positivity_end(), pi / 2, 1e-9);

  const auto hyper = auxiliary_solution(oracle::coeffs("1", "1", "1"), 0.0, 3.0);
  for (double x : {0.3, 1.0, 2.5}) EXPECT_NEAR(hyper.h(x), std::cosh(x), 1e-9 * std::cosh(x));
  EXPECT_EQ(hyper.positivity_end(), 3.0);
}

TEST(Auxiliary, VariableLeadingCoefficient) {
  // (x h')' = 0 has only the constant solution with h'(a) = 0.
  const auto aux = auxiliary_solution(oracle::coeffs("x", "1", "0"), 1.0, 4.0);
  EXPECT_NEAR(aux.h(3.5), 1.0, 1e-14);
  // r = exp(x), q = exp(x): h'' + h' - h = 0 with h(0)=1, h'(0)=0.
  const auto e = auxiliary_solution(oracle::coeffs("exp(x)", "1", "exp(x)"), 0.0, 2.0);
  const double s = std::sqrt(5.0), k1 = (-1 + s) / 2, k2 = (-1 - s) / 2;
  const double c1 = -k2 / (k1 - k2), c2 = k1 / (k1 - k2);
  for (double x : {0.5, 1.0, 2.0}) EXPECT_NEAR(e.h(x), c1 * std::exp(k1 * x) + c2 * std::exp(k2 * x), 1e-9);
}

TEST(ChangeOfVariables, IdentityWhenHIsOne) {
  const auto c = oracle::coeffs("1+x^2", "exp(-x)", "0");
  const auto tp = change_of_variables(c, aux_of(c, 0.5, 2.5));
  for (double x : {0.5, 1.0, 1.7, 2.5}) {
    EXPECT_NEAR(tp.t_of_x(x), x - 0.5, 1e-13);
    const double t = x - 0.5;
    EXPECT_NEAR(tp.r(t), c.r(x), 1e-12);
    EXPECT_NEAR(tp.p(t), c.p(x), 1e-12);
    EXPECT_EQ(tp.q(t), 0.0);
  }
}

TEST(ChangeOfVariables, CoshTransform) {
  const auto c = oracle::coeffs("1", "1", "1");
  const auto tp = change_of_variables(c, aux_of(c, 0.0, 2.0));
  EXPECT_NEAR(tp.t_of_x(1.0), std::sinh(1.0), 1e-8);
  EXPECT_NEAR(tp.t_of_x(1.0), 1.175201, 1e-6);
  EXPECT_NEAR(tp.r(0.0), 1.0, 1e-14);
  // x(t) = asinh(t), so R(t) = (1 + t^2)^(3/2) and P(t) = (1 + t^2)^(-1/2).
  for (double t : {0.2, 1.0, 3.0}) {
    EXPECT_NEAR(tp.x_of_t(t), std::asinh(t), 1e-9);
    EXPECT_NEAR(tp.r(t), std::pow(1 + t * t, 1.5), 1e-8);
    EXPECT_NEAR(tp.p(t), 1 / std::sqrt(1 + t * t), 1e-9);
  }
}

TEST(ChangeOfVariables, InverseRoundTripAndMonotonicity) {
  const auto c = oracle::coeffs("1+0.3*sin(x)", "1", "-0.4+0.2*cos(2*x)");
  const auto tp = change_of_variables(c, aux_of(c, 0.0, 6.0));
  ASSERT_LT(tp.x_end(), 6.0);  // h reaches zero
  double prev_t = -1.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = tp.x_end() * i / 400.0;
    const double t = tp.t_of_x(x);
    EXPECT_GT(t, prev_t);
    prev_t = t;
    EXPECT_NEAR(tp.x_of_t(t), x, 1e-10) << x;
  }
  EXPECT_EQ(tp.t_of_x(0.0), 0.0);
  EXPECT_THROW(tp.x_of_t(tp.t_end() + 1.0), InvalidArgument);
}

TEST(ChangeOfVariables, Errors) {
  const auto c = oracle::coeffs("1", "1", "0");
  EXPECT_THROW(change_of_variables(c, aux_of(c, 0.0, 1.0), 0.05), InvalidArgument);
  const auto cq = oracle::coeffs("1", "1", "-1");
  EXPECT_THROW(change_of_variables(cq, aux_of(cq, 0.0, 3.0), 2.0), InvalidArgument);
}

TEST(Relations, IdentityTransformIsExact) {
  const auto c = oracle::coeffs("1+x^2", "exp(-x)", "0");
  const auto tp = change_of_variables(c, aux_of(c, 0.0, 2.0));
  const auto orig = oscillation::fundamental_solutions(c, 1.0, 0.0, 2.0);
  const auto res = verify_transform_relations(tp, orig, 2.0);
  EXPECT_LE(res.derivative, 1e-9);
  EXPECT_LE(res.third_quasi, 1e-9);
  EXPECT_LE(res.sigma, 1e-9);
  EXPECT_LE(res.tau, 1e-9);
  EXPECT_LE(res.tau_p, 1e-9);
  EXPECT_LE(res.sigma_p, 1e-9);
}

TEST(Relations, CoshTransformResiduals) {
  const auto c = oracle::coeffs("1", "1", "1");
  const auto tp = change_of_variables(c, aux_of(c, 0.0, 2.0));
  const auto orig = oscillation::fundamental_solutions(c, 1.0, 0.0, 2.0);
  const auto res = verify_transform_relations(tp, orig, 1.5);
  EXPECT_LE(res.worst(), 1e-6);
  EXPECT_LE(res.tau, 1e-6);
  EXPECT_LE(res.consistency, 1e-6);
}

TEST(Relations, VariableCoefficientResiduals) {
  const auto c = oracle::coeffs("1+0.5*x", "2+sin(x)", "0.3-0.8*x");
  const auto aux = aux_of(c, 0.0, 4.0);
  const auto tp = change_of_variables(c, aux);
  const double end = std::min(3.0, 0.9 * tp.x_end());
  const auto orig = oscillation::fundamental_solutions(c, 2.0, 0.0, 4.0);
  const auto res = verify_transform_relations(tp, orig, end, 50, 2.0);
  EXPECT_LE(res.worst(), 1e-6);
  EXPECT_THROW(verify_transform_relations(tp, orig, 3.9), InvalidArgument);
}

TEST(Relations, FocalPointTransports) {
  for (const char* q : {"1", "-0.1", "0.5*sin(x)"}) {
    const auto c = oracle::coeffs("1", "1+0.2*x", q);
    const Problem<expr::CoefficientSet> pb{0.0, c, 8.0};
    const auto fp = oscillation::systems_focal_point(pb);
    ASSERT_TRUE(fp.mu1) << q;
    const auto tp = change_of_variables(c, aux_of(c, 0.0, 8.0));
    const auto pt = transport_focal_point(tp, *fp.mu1);
    ASSERT_TRUE(pt) << q;
    EXPECT_LE(pt->mismatch(), 1e-6) << q;
  }
}

TEST(Relations, CsvDump) {
  const auto c = oracle::coeffs("1", "1", "1");
  const auto tp = change_of_variables(c, aux_of(c, 0.0, 1.0));
  std::ostringstream os;
  const auto grid = oscillation::uniform_grid(0.0, 1.0, 3);
  write_transform_csv(os, tp, grid);
  EXPECT_EQ(os.str().substr(0, 6), "x,t,h\n");
  EXPECT_NE(os.str().find("1,1.17520119364,1.54308063482"), std::string::npos) << os.str();
}
