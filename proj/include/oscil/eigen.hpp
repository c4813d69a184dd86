#pragma once

// Shooting eigenvalue solvers.
//
// Fourth order, focal conditions y(a) = y1(a) = y'(b) = Ty(b) = 0: the
// eigenvalues are the zeros in lambda of tau'(lambda, b).
// Second order, -(r y')' + q y = rho p y with y'(a) = 0 and either y(b) = 0
// or y'(b) = 0: shooting on y(b) or r y'(b) from y(a) = 1, y'(a) = 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "oscil/admissible.hpp"
#include "oscil/ivp.hpp"
#include "oscil/oscillation.hpp"
#include "oscil/quadrature.hpp"

namespace oscil::eigen {

struct EigenvalueResult {
  int k = 0;
  double value = 0.0;
  double shoot_residual = 0.0;
  /// max(1, |F|) at the bracket endpoints.
  double scale = 1.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// The shooting function takes opposite signs just left and right of value.
  bool sign_change = false;
};

struct ShootingOptions {
  double lambda_cap = 1e6;
  Tolerance tol{};
  int min_samples = 32;
};

enum class RightBoundary { dirichlet, neumann };

namespace detail {

inline double sample_max(double a, double b, auto&& f, int points = 1001) {
  double m = -INFINITY;
  for (int i = 0; i < points; ++i) m = std::max(m, f(a + (b - a) * i / (points - 1)));
  return m;
}

inline double sample_min(double a, double b, auto&& f, int points = 1001) {
  return -sample_max(a, b, [&](double x) { return -f(x); }, points);
}

/// k-th sign change of f above `start`. Intervals [start, start+1],
/// then widths growing by 4, each sampled uniformly in
/// s = (lambda - start)^(1/power) at roughly 8 samples per expected root.
template <class F>
EigenvalueResult kth_root(F&& f, int k, double start, double power, double roots_per_s, const ShootingOptions& opt) {
  auto lam = [&](double s) { return start + std::pow(s, power); };
  auto s_of = [&](double l) { return std::pow(std::max(0.0, l - start), 1.0 / power); };

  double last_l = start, last_f = f(start);
  int found = 0;
  if (last_f == 0.0 && ++found == k) return {k, start, 0.0, 1.0, start, start, true};

  double lo = start, width = 1.0;
  const double cap = std::max(opt.lambda_cap, start + 1.0);
  while (lo < cap) {
    const double hi = std::min(cap, lo + width);
    const double s0 = s_of(lo), s1 = s_of(hi);
    const int n = std::max(opt.min_samples, static_cast<int>(std::ceil(8 * roots_per_s * (s1 - s0))));
    for (int j = 1; j <= n; ++j) {
      const double l = j == n ? hi : lam(s0 + (s1 - s0) * j / n);
      const double v = f(l);
      if (v == 0.0) {
        if (++found == k) return {k, l, 0.0, std::max(1.0, std::abs(last_f)), l, l, true};
        // The next non-zero sample starts a fresh comparison.
        last_l = l;
        last_f = 0.0;
        continue;
      }
      if (last_f != 0.0 && std::signbit(v) != std::signbit(last_f) && ++found == k) {
        std::uintmax_t iters = 200;
        const auto [rlo, rhi] = boost::math::tools::toms748_solve(
            [&](double x) { return f(x); }, last_l, l, last_f, v, boost::math::tools::eps_tolerance<double>(50),
            iters);
        EigenvalueResult out;
        out.k = k;
        out.value = 0.5 * (rlo + rhi);
        out.shoot_residual = std::abs(f(out.value));
        out.scale = std::max({1.0, std::abs(last_f), std::abs(v)});
        out.bracket_lo = last_l;
        out.bracket_hi = l;
        const double d = std::min(1e-7 * std::max(1.0, std::abs(out.value)), 0.25 * (l - last_l));
        out.sign_change = std::signbit(f(out.value - d)) != std::signbit(f(out.value + d));
        return out;
      }
      last_l = l;
      last_f = v;
    }
    lo = hi;
    width *= 4.0;
  }
  throw BracketError("eigenvalue k=" + std::to_string(k) + " not bracketed below " + format_real(cap));
}

}  // namespace detail

/// tau'(lambda, b) of the lambda-parameterized fundamental pair.
template <Coefficients C>
double focal_shooting(const C& coeffs, double a, double b, double lambda, const Tolerance& tol = {}) {
  const auto traj = oscillation::fundamental_solutions(coeffs, lambda, a, b, tol);
  return oscillation::subwronskians(b, traj.back(), coeffs.r(b)).tau_p;
}

/// Whether tau'(lambda, .) vanishes in (a, b]. The number of such focal
/// points equals the number of focal eigenvalues below lambda.
template <Coefficients C>
bool has_focal_point(const C& coeffs, double a, double b, double lambda, const Tolerance& tol = {}) {
  const auto traj = oscillation::fundamental_solutions(coeffs, lambda, a, b, tol);
  return oscillation::focal_points_from(traj, a, b).mu1.has_value();
}

/// A value at or below the first focal eigenvalue: 0 when that bound
/// already holds, otherwise found by stepping down and bisecting on the
/// presence of focal points.
template <Coefficients C>
double focal_spectrum_floor(const C& coeffs, double a, double b, const ShootingOptions& opt = {}) {
  if (!has_focal_point(coeffs, a, b, 0.0, opt.tol)) return 0.0;
  double hi = 0.0, lo = -1.0;
  while (has_focal_point(coeffs, a, b, lo, opt.tol)) {
    hi = lo;
    lo *= 4.0;
    if (lo < -opt.lambda_cap) throw BracketError("first focal eigenvalue lies below -" + format_real(opt.lambda_cap));
  }
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    (has_focal_point(coeffs, a, b, mid, opt.tol) ? hi : lo) = mid;
  }
  return lo;
}

template <Coefficients C>
EigenvalueResult focal_eigenvalue(const C& coeffs, double a, double b, int k, const ShootingOptions& opt = {}) {
  if (!(b > a)) throw InvalidArgument("focal eigenvalue needs b > a");
  if (k < 1) throw InvalidArgument("eigenvalue index must be >= 1");
  const double density =
      (b - a) * detail::sample_max(a, b, [&](double x) { return std::pow(coeffs.p(x) / coeffs.r(x), 0.25); }, 101) /
      std::numbers::pi;
  const double start = focal_spectrum_floor(coeffs, a, b, opt);
  return detail::kth_root([&](double l) { return focal_shooting(coeffs, a, b, l, opt.tol); }, k, start, 4.0, density,
                          opt);
}

/// Solution of -(r y')' + q y = rho p y with y(a) = 1, y'(a) = 0, as
/// the state [y, r y'].
template <Coefficients C>
Trajectory<2> sl_solution(const C& coeffs, double a, double b, double rho, const Tolerance& tol = {}) {
  auto field = [&](double x, const State<2>& s) -> State<2> {
    return {s[1] / coeffs.r(x), (coeffs.q(x) - rho * coeffs.p(x)) * s[0]};
  };
  return integrate<2>(field, a, State<2>{1.0, 0.0}, b, tol);
}

template <Coefficients C>
double sl_shooting(const C& coeffs, double a, double b, double rho, RightBoundary right, const Tolerance& tol = {}) {
  const auto end = sl_solution(coeffs, a, b, rho, tol).back();
  return right == RightBoundary::dirichlet ? end[0] : end[1];
}

/// Every eigenvalue is at least min(q/p). The search starts below that by
/// (pi / 2(b-a))^2 r_min / p_max, the spacing scale of the spectrum, so
/// that sampling in sqrt(rho - start) resolves the lowest eigenvalues.
template <Coefficients C>
EigenvalueResult sl_eigenvalue(const C& coeffs, double a, double b, int k, RightBoundary right,
                               const ShootingOptions& opt = {}) {
  if (!(b > a)) throw InvalidArgument("Sturm-Liouville eigenvalue needs b > a");
  if (k < 1) throw InvalidArgument("eigenvalue index must be >= 1");
  const double gap = std::pow(std::numbers::pi / (2 * (b - a)), 2) *
                     detail::sample_min(a, b, [&](double x) { return coeffs.r(x); }) /
                     detail::sample_max(a, b, [&](double x) { return coeffs.p(x); });
  const double start = detail::sample_min(a, b, [&](double x) { return coeffs.q(x) / coeffs.p(x); }) - gap;
  const double density =
      (b - a) * detail::sample_max(a, b, [&](double x) { return std::sqrt(coeffs.p(x) / coeffs.r(x)); }, 101) /
      std::numbers::pi;
  return detail::kth_root([&](double l) { return sl_shooting(coeffs, a, b, l, right, opt.tol); }, k, start, 2.0,
                          density, opt);
}

struct MonotonicityPoint {
  double b;
  double rho1;
};

struct MonotonicityScan {
  std::vector<MonotonicityPoint> points;
  bool strictly_decreasing = true;
  /// Grid values b where rho1 failed to decrease from the previous point.
  std::vector<double> violations;
  /// Central-difference slopes at interior points.
  std::vector<double> slopes;
};

/// First Dirichlet eigenvalue on [a, b] for each b.
template <Coefficients C>
MonotonicityScan monotonicity_scan(const C& coeffs, double a, std::span<const double> b_grid,
                                   const ShootingOptions& opt = {}) {
  for (std::size_t i = 0; i < b_grid.size(); ++i) {
    if (!(b_grid[i] > a)) throw InvalidArgument("scan grid point b=" + format_real(b_grid[i]) + " not above a");
    if (i > 0 && !(b_grid[i] > b_grid[i - 1])) throw InvalidArgument("scan grid must be strictly increasing");
  }
  MonotonicityScan out;
  for (double b : b_grid)
    out.points.push_back({b, sl_eigenvalue(coeffs, a, b, 1, RightBoundary::dirichlet, opt).value});
  for (std::size_t i = 1; i < out.points.size(); ++i)
    if (!(out.points[i].rho1 < out.points[i - 1].rho1)) {
      out.strictly_decreasing = false;
      out.violations.push_back(out.points[i].b);
    }
  for (std::size_t i = 1; i + 1 < out.points.size(); ++i)
    out.slopes.push_back((out.points[i + 1].rho1 - out.points[i - 1].rho1) /
                         (out.points[i + 1].b - out.points[i - 1].b));
  return out;
}

inline void write_scan_csv(std::ostream& os, const MonotonicityScan& scan) {
  os << "b,rho1\n";
  char buf[64];
  for (const auto& p : scan.points) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.b, p.rho1);
    os << buf;
  }
}

/// (1/p_max) (r_min / (b-a)^2 + q_min / (b-a)), extrema sampled on
/// [a, b0] at 1001 points.
template <Coefficients C>
double lambda_lower_bound(const C& coeffs, double a, double b, double b0) {
  if (!(a < b && b <= b0)) throw InvalidArgument("lower bound needs a < b <= b0");
  const double r_min = detail::sample_min(a, b0, [&](double x) { return coeffs.r(x); });
  const double q_min = detail::sample_min(a, b0, [&](double x) { return coeffs.q(x); });
  const double p_max = detail::sample_max(a, b0, [&](double x) { return coeffs.p(x); });
  const double L = b - a;
  return (r_min / (L * L) + q_min / L) / p_max;
}

/// [integral r (w'')^2 + q (w')^2] / [integral p w^2] over [a, b].
template <Coefficients C>
double rayleigh_quotient(const C& coeffs, const AdmissibleFunction& w, double a, double b, int panels = 64) {
  const double mass = integrate_gl([&](double x) { return coeffs.p(x) * w(x) * w(x); }, a, b, panels);
  if (!(mass > 0.0)) throw InvalidArgument("Rayleigh quotient of a function that vanishes identically");
  const double stiff = integrate_gl(
      [&](double x) {
        const double d1 = w.d1(x), d2 = w.d2(x);
        return coeffs.r(x) * d2 * d2 + coeffs.q(x) * d1 * d1;
      },
      a, b, panels);
  return stiff / mass;
}

}  // namespace oscil::eigen
