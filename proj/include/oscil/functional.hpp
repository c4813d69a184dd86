#pragma once

// Quadratic functionals and the criteria built on them.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>

#include "oscil/admissible.hpp"
#include "oscil/eigen.hpp"
#include "oscil/oscillation.hpp"
#include "oscil/quadrature.hpp"

namespace oscil::functional {

namespace detail {

inline void require_nontrivial(const AdmissibleFunction& w, double a, double b) {
  if (!(integrate_gl([&](double x) { return w(x) * w(x); }, a, b) > 0.0))
    throw InvalidArgument("quadratic form of a function that vanishes identically");
}

}  // namespace detail

/// integral of r (w'')^2 + q (w')^2 - p w^2 over [a, b], w in the focal class.
template <Coefficients C>
double quadratic_form_I4(const C& coeffs, const AdmissibleFunction& w, double a, double b) {
  if (w.boundary_class() != BoundaryClass::focal) throw InvalidArgument("I4 needs w(a) = 0 and w'(b) = 0");
  detail::require_nontrivial(w, a, b);
  return integrate_gl(
      [&](double x) {
        const double v = w(x), d1 = w.d1(x), d2 = w.d2(x);
        return coeffs.r(x) * d2 * d2 + coeffs.q(x) * d1 * d1 - coeffs.p(x) * v * v;
      },
      a, b);
}

/// integral of r (w')^2 + q w^2 over [a, b].
template <Coefficients C>
double quadratic_form_I2(const C& coeffs, const AdmissibleFunction& w, double a, double b) {
  detail::require_nontrivial(w, a, b);
  return integrate_gl(
      [&](double x) {
        const double v = w(x), d1 = w.d1(x);
        return coeffs.r(x) * d1 * d1 + coeffs.q(x) * v * v;
      },
      a, b);
}

enum class Positivity { strict, weak, fails };

inline const char* to_string(Positivity p) {
  switch (p) {
    case Positivity::strict: return "strict";
    case Positivity::weak: return "weak";
    case Positivity::fails: return "fails";
  }
  return "?";
}

struct PositivityResult {
  Positivity verdict;
  eigen::EigenvalueResult witness;
};

/// Sign of the first Neumann-Neumann eigenvalue of -(r y')' + q y = rho p y.
template <Coefficients C>
PositivityResult condition_quadform_positive(const C& coeffs, double a, double b,
                                             const eigen::ShootingOptions& opt = {}) {
  if (!(b > a)) throw InvalidArgument("positivity check needs b > a");
  const auto e = eigen::sl_eigenvalue(coeffs, a, b, 1, eigen::RightBoundary::neumann, opt);
  const Positivity v = e.value > 1e-10 ? Positivity::strict : e.value < -1e-10 ? Positivity::fails : Positivity::weak;
  return {v, e};
}

/// The Neumann eigenfunction at rho as a free-class trial function. w'' is
/// a difference quotient of the dense w'.
template <Coefficients C>
AdmissibleFunction neumann_eigenfunction(const C& coeffs, double a, double b, double rho, const Tolerance& tol = {}) {
  auto traj = std::make_shared<const Trajectory<2>>(eigen::sl_solution(coeffs, a, b, rho, tol));
  auto dw = [traj, coeffs](double x) { return (*traj)(x)[1] / coeffs.r(x); };
  const double d = 1e-5 * (b - a);
  auto ddw = [dw, a, b, d](double x) {
    const double lo = std::max(a, x - d), hi = std::min(b, x + d);
    return (dw(hi) - dw(lo)) / (hi - lo);
  };
  return AdmissibleFunction([traj](double x) { return (*traj)(x)[0]; }, dw, ddw, a, b, BoundaryClass::free);
}

/// Integrated shifted Legendre polynomials on [a, b]:
/// phi_k(x) = integral from a of P_{k-1}(2 (s-a)/(b-a) - 1), k = 1..m.
/// They span the polynomials of degree <= m that vanish at a, and
/// phi_k'(b) = 1 for every k.
struct FocalBasis {
  double a, b;
  int m;

  void eval(double x, Eigen::VectorXd& f, Eigen::VectorXd& d1, Eigen::VectorXd& d2) const {
    const double len = b - a, xi = 2 * (x - a) / len - 1;
    f.resize(m);
    d1.resize(m);
    d2.resize(m);
    for (int k = 1; k <= m; ++k) {
      const int j = k - 1;
      d1[j] = boost::math::legendre_p(j, xi);
      d2[j] = j == 0 ? 0.0 : 2 / len * boost::math::legendre_p_prime(j, xi);
      f[j] = j == 0 ? 0.5 * len * (xi + 1)
                    : 0.5 * len * (boost::math::legendre_p(k, xi) - boost::math::legendre_p(k - 2, xi)) / (2 * k - 1);
    }
  }
};

struct WirtingerResult {
  double b = 0.0;
  int n = 0;
  double min_quotient = 0.0;
  /// min_quotient > 1 + 1e-8.
  bool holds = false;
  /// Minimizer coefficients in the integrated Legendre basis (n + 1 entries,
  /// summing to zero), normalized to unit weighted mass.
  std::vector<double> coefficients;
};

/// Minimum of [integral r (w'')^2 + q (w')^2] / [integral p w^2] over
/// polynomials of degree <= n + 1 with w(a) = 0, w'(b) = 0.
template <Coefficients C>
WirtingerResult wirtinger_check(const C& coeffs, double a, double b, int n) {
  if (n < 2) throw InvalidArgument("basis size must be at least 2, got " + std::to_string(n));
  if (!(b > a)) throw InvalidArgument("Wirtinger check needs b > a");
  const int m = n + 1;
  const FocalBasis basis{a, b, m};
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m), M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd f, d1, d2;
  for (const auto& [x, wt] : gl_nodes(a, b)) {
    basis.eval(x, f, d1, d2);
    K.noalias() += wt * (coeffs.r(x) * d2 * d2.transpose() + coeffs.q(x) * d1 * d1.transpose());
    M.noalias() += wt * coeffs.p(x) * f * f.transpose();
  }
  // w'(b) = sum of coefficients; restrict to its orthogonal complement.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(m, 1));
  const Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd Z = Q.rightCols(n);
  const Eigen::MatrixXd Kz = Z.transpose() * K * Z, Mz = Z.transpose() * M * Z;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> mass(Mz);
  if (mass.info() != Eigen::Success || mass.eigenvalues().minCoeff() <= 1e-14 * mass.eigenvalues().maxCoeff())
    throw Error("singular mass matrix in Wirtinger check");
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kz, Mz);
  if (ges.info() != Eigen::Success) throw Error("generalized eigensolver failed in Wirtinger check");
  WirtingerResult out;
  out.b = b;
  out.n = n;
  out.min_quotient = ges.eigenvalues()[0];
  out.holds = out.min_quotient > 1 + 1e-8;
  const Eigen::VectorXd c = Z * ges.eigenvectors().col(0);
  out.coefficients.assign(c.data(), c.data() + c.size());
  return out;
}

/// The minimizer of a Wirtinger check as a focal-class trial function.
inline AdmissibleFunction wirtinger_minimizer(const WirtingerResult& res, double a) {
  const auto basis = std::make_shared<const FocalBasis>(FocalBasis{a, res.b, res.n + 1});
  const auto c = std::make_shared<const Eigen::VectorXd>(
      Eigen::Map<const Eigen::VectorXd>(res.coefficients.data(), static_cast<Eigen::Index>(res.coefficients.size())));
  auto part = [basis, c](int which) {
    return [basis, c, which](double x) {
      Eigen::VectorXd f, d1, d2;
      basis->eval(x, f, d1, d2);
      return c->dot(which == 0 ? f : which == 1 ? d1 : d2);
    };
  };
  return AdmissibleFunction(part(0), part(1), part(2), a, res.b, BoundaryClass::focal);
}

// Comparison of two problems on the same window.

enum class Relation { less, equal, greater, not_applicable };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::less: return "less";
    case Relation::equal: return "equal";
    case Relation::greater: return "greater";
    case Relation::not_applicable: return "not_applicable";
  }
  return "?";
}

struct PointComparison {
  std::optional<double> point;
  std::optional<double> point0;
  Relation relation = Relation::not_applicable;
  /// point <= point0 (an absent point0 counts as beyond the window).
  Outcome outcome = Outcome::not_applicable;
};

struct ComparisonReport {
  PointComparison focal;
  PointComparison conjugate;
};

namespace detail {

inline PointComparison compare_points(std::optional<double> p, std::optional<double> p0, double tol) {
  PointComparison out{p, p0};
  if (p && p0) {
    out.relation = std::abs(*p - *p0) <= tol ? Relation::equal : *p < *p0 ? Relation::less : Relation::greater;
  } else if (p) {
    out.relation = Relation::less;
  } else if (p0) {
    out.relation = Relation::greater;
  }
  out.outcome = out.relation == Relation::not_applicable ? Outcome::not_applicable
                                                         : outcome_of(out.relation != Relation::greater);
  return out;
}

}  // namespace detail

/// Checks r <= r0, p0 <= p, q0 >= q at 1001 points of [a, x_max].
template <Coefficients C, Coefficients C0>
void require_dominance(const C& c, const C0& c0, double a, double x_max) {
  for (int i = 0; i <= 1000; ++i) {
    const double x = a + (x_max - a) * i / 1000.0;
    std::string bad;
    if (c.r(x) > c0.r(x)) bad = "r <= r0";
    else if (c0.p(x) > c.p(x)) bad = "p0 <= p";
    else if (c0.q(x) < c.q(x)) bad = "q0 >= q";
    if (!bad.empty()) throw InvalidArgument("comparison dominance " + bad + " violated at x=" + format_real(x));
  }
}

template <Coefficients C, Coefficients C0>
ComparisonReport comparison_check(const Problem<C>& pb, const Problem<C0>& pb0) {
  if (pb.a != pb0.a || pb.x_max != pb0.x_max) throw InvalidArgument("comparison problems must share [a, x_max]");
  require_dominance(pb.coeffs, pb0.coeffs, pb.a, pb.x_max);
  const auto traj = oscillation::fundamental_solutions(pb.coeffs, 1.0, pb.a, pb.x_max, pb.tol);
  const auto traj0 = oscillation::fundamental_solutions(pb0.coeffs, 1.0, pb0.a, pb0.x_max, pb0.tol);
  const double tol = 1e-8 * std::max(1.0, pb.x_max - pb.a);
  ComparisonReport out;
  out.focal = detail::compare_points(oscillation::focal_points_from(traj, pb.a, pb.x_max).mu1,
                                     oscillation::focal_points_from(traj0, pb0.a, pb0.x_max).mu1, tol);
  out.conjugate = detail::compare_points(oscillation::conjugate_point_from(traj, pb.a, pb.x_max),
                                         oscillation::conjugate_point_from(traj0, pb0.a, pb0.x_max), tol);
  return out;
}

// Conjugacy criteria from divergent coefficient integrals.

struct DivergenceFlags {
  bool int_q_diverges_to_minus_inf = false;
  bool int_p_diverges = false;
  bool int_inv_r_diverges = false;
};

struct PartialIntegrals {
  std::vector<double> x;
  std::vector<double> q, p, inv_r;
};

struct DivergenceVerdict {
  /// "systems-conjugate" or "inconclusive".
  std::string verdict;
  /// Criteria whose hypotheses the flags satisfy: "divergent_q_and_p",
  /// "divergent_q_and_inverse_r".
  std::vector<std::string> criteria;
  PartialIntegrals heuristic;
  /// Apparent divergence from the partial integrals: the value at a + 1e3
  /// is at least twice the value at a + 1e2, with the expected sign.
  DivergenceFlags apparent;
};

template <Coefficients C>
PartialIntegrals partial_integrals(const C& coeffs, double a, int points_per_decade = 10) {
  PartialIntegrals out;
  double prev = a, iq = 0, ip = 0, ir = 0;
  const int total = 3 * points_per_decade;
  for (int i = 0; i <= total; ++i) {
    const double x = a + std::pow(10.0, static_cast<double>(i) / points_per_decade);
    const int panels = std::max(4, static_cast<int>(std::ceil(4 * (x - prev))));
    iq += integrate_gl([&](double s) { return coeffs.q(s); }, prev, x, panels);
    ip += integrate_gl([&](double s) { return coeffs.p(s); }, prev, x, panels);
    ir += integrate_gl([&](double s) { return 1.0 / coeffs.r(s); }, prev, x, panels);
    out.x.push_back(x);
    out.q.push_back(iq);
    out.p.push_back(ip);
    out.inv_r.push_back(ir);
    prev = x;
  }
  return out;
}

template <Coefficients C>
DivergenceVerdict divergence_criteria(const C& coeffs, double a, const DivergenceFlags& flags) {
  DivergenceVerdict out;
  if (flags.int_q_diverges_to_minus_inf && flags.int_p_diverges) out.criteria.push_back("divergent_q_and_p");
  if (flags.int_q_diverges_to_minus_inf && flags.int_inv_r_diverges)
    out.criteria.push_back("divergent_q_and_inverse_r");
  out.verdict = out.criteria.empty() ? "inconclusive" : "systems-conjugate";
  out.heuristic = partial_integrals(coeffs, a);
  const auto& h = out.heuristic;
  const std::size_t last = h.x.size() - 1;
  std::size_t decade = 0;
  while (decade + 1 < last && h.x[decade + 1] - a <= 100 * (1 + 1e-12)) ++decade;
  auto grows = [&](const std::vector<double>& v, double sign) {
    return sign * v[last] > 0 && sign * v[last] >= 2 * std::abs(v[decade]);
  };
  out.apparent = {grows(h.q, -1.0), grows(h.p, 1.0), grows(h.inv_r, 1.0)};
  return out;
}

}  // namespace oscil::functional
