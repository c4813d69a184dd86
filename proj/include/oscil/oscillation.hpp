#pragma once

// Fundamental solutions u, v of the fourth-order equation, their
// subwronskians, and the located systems-conjugate / systems-focal points.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "oscil/auxiliary.hpp"
#include "oscil/ivp.hpp"
#include "oscil/scan.hpp"

namespace oscil {

/// Interval start, coefficients, scan window [a, x_max] and tolerances.
template <Coefficients C>
struct Problem {
  double a;
  C coeffs;
  double x_max;
  Tolerance tol{};
};

enum class Outcome { pass, fail, not_applicable };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::not_applicable: return "not_applicable";
  }
  return "?";
}

inline Outcome outcome_of(bool ok) { return ok ? Outcome::pass : Outcome::fail; }

/// One evaluated claim: what was checked and the numbers behind the verdict.
struct Check {
  std::string name;
  std::string claim;
  Outcome outcome = Outcome::not_applicable;
  std::string evidence;
};

}  // namespace oscil

namespace oscil::oscillation {

/// [u, u', u1, Tu, v, v', v1, Tv]
using PairState = State<8>;

inline QuasiState u_part(const PairState& s) { return QuasiState::from(s.data()); }
inline QuasiState v_part(const PairState& s) { return QuasiState::from(s.data() + 4); }

/// u starts from (0, 1, 0, 0) and v from (0, 0, 0, 1), integrated jointly.
template <Coefficients C>
Trajectory<8> fundamental_solutions(const C& coeffs, double lambda, double a, double x_max,
                                    const Tolerance& tol = {}) {
  const PairState init{0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  return integrate<8>(to_first_order(coeffs, lambda), a, init, x_max, tol);
}

struct SubwronskianSample {
  double x = 0.0;
  double sigma = 0.0;    // u v' - v u'
  double sigma_p = 0.0;  // (u v1 - v u1) / r
  double tau = 0.0;      // u Tv - v Tu
  double tau_p = 0.0;    // u' Tv - v' Tu
  double rho = 0.0;      // u1 Tv - v1 Tu
  /// r sigma' tau' - (tau^2 + rho sigma).
  double identity_residual = 0.0;
  /// max(1, |r sigma' tau'|).
  double identity_scale = 1.0;
};

inline SubwronskianSample subwronskians(double x, const PairState& s, double r) {
  const QuasiState u = u_part(s), v = v_part(s);
  SubwronskianSample out;
  out.x = x;
  out.sigma = u.y * v.yp - v.y * u.yp;
  const double r_sigma_p = u.y * v.y1 - v.y * u.y1;
  out.sigma_p = r_sigma_p / r;
  out.tau = u.y * v.Ty - v.y * u.Ty;
  out.tau_p = u.yp * v.Ty - v.yp * u.Ty;
  out.rho = u.y1 * v.Ty - v.y1 * u.Ty;
  const double lhs = r_sigma_p * out.tau_p;
  out.identity_residual = lhs - (out.tau * out.tau + out.rho * out.sigma);
  out.identity_scale = std::max(1.0, std::abs(lhs));
  return out;
}

template <Coefficients C>
SubwronskianSample subwronskians_at(const Trajectory<8>& traj, const C& coeffs, double x) {
  return subwronskians(x, traj(x), coeffs.r(x));
}

enum class Subwronskian { sigma, sigma_p, tau, tau_p, rho };

/// Value whose sign matches the named subwronskian; sigma' is reported as
/// r sigma' so no coefficient evaluation is needed.
inline double sign_functional(Subwronskian which, const PairState& s) {
  const QuasiState u = u_part(s), v = v_part(s);
  switch (which) {
    case Subwronskian::sigma: return u.y * v.yp - v.y * u.yp;
    case Subwronskian::sigma_p: return u.y * v.y1 - v.y * u.y1;
    case Subwronskian::tau: return u.y * v.Ty - v.y * u.Ty;
    case Subwronskian::tau_p: return u.yp * v.Ty - v.yp * u.Ty;
    case Subwronskian::rho: return u.y1 * v.Ty - v.y1 * u.Ty;
  }
  return 0.0;
}

struct IdentityResiduals {
  /// max |r sigma' tau' - tau^2 - rho sigma| / max(1, |r sigma' tau'|)
  double product_identity = 0.0;
  /// max |D tau' - (rho/r - lambda p sigma)| / max(1, |rhs|), central differences
  double tau_second = 0.0;
  /// max |D(r sigma') - (2 tau + q sigma)| / max(1, |rhs|)
  double r_sigma_prime = 0.0;
  double worst_x = 0.0;
};

template <Coefficients C>
IdentityResiduals identity_residuals(const Trajectory<8>& traj, const C& coeffs, std::span<const double> grid,
                                     double lambda = 1.0, double fd_step = 1e-4) {
  IdentityResiduals out;
  const double lo = traj.start() + fd_step, hi = traj.end() - fd_step;
  for (double x : grid) {
    const SubwronskianSample s = subwronskians_at(traj, coeffs, x);
    const double rel = std::abs(s.identity_residual) / s.identity_scale;
    if (rel > out.product_identity) {
      out.product_identity = rel;
      out.worst_x = x;
    }
    if (lo >= hi) continue;
    const double xc = std::clamp(x, lo, hi);
    const SubwronskianSample c = xc == x ? s : subwronskians_at(traj, coeffs, xc);
    const SubwronskianSample plus = subwronskians_at(traj, coeffs, xc + fd_step);
    const SubwronskianSample minus = subwronskians_at(traj, coeffs, xc - fd_step);
    const double r = coeffs.r(xc);
    const double d_tau_p = (plus.tau_p - minus.tau_p) / (2.0 * fd_step);
    const double rhs_tau = c.rho / r - lambda * coeffs.p(xc) * c.sigma;
    out.tau_second = std::max(out.tau_second, std::abs(d_tau_p - rhs_tau) / std::max(1.0, std::abs(rhs_tau)));
    const double d_rsp = (coeffs.r(xc + fd_step) * plus.sigma_p - coeffs.r(xc - fd_step) * minus.sigma_p) /
                         (2.0 * fd_step);
    const double rhs_rsp = 2.0 * c.tau + coeffs.q(xc) * c.sigma;
    out.r_sigma_prime = std::max(out.r_sigma_prime, std::abs(d_rsp - rhs_rsp) / std::max(1.0, std::abs(rhs_rsp)));
  }
  return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = hi;
  return g;
}

/// Offset past the forced zeros at x = a.
inline double scan_offset(double a, double x_max) { return std::max(1e-6, 1e-4 * (x_max - a)); }
inline double locate_tolerance(double a, double x_max) { return 1e-9 * (x_max - a); }

struct ZeroScan {
  std::vector<double> zeros;
  std::vector<double> suspected;
};

/// All sign changes of a subwronskian on [from, traj.end()], refined.
inline ZeroScan subwronskian_zeros(const Trajectory<8>& traj, Subwronskian which, double from, double tol_x,
                                   std::size_t max_zeros = static_cast<std::size_t>(-1)) {
  auto g = [which](double, const PairState& s) { return sign_functional(which, s); };
  const SignScan scan = detect_sign_changes(traj, g, from);
  ZeroScan out{{}, scan.suspected};
  for (const Bracket& b : scan.brackets) {
    if (out.zeros.size() >= max_zeros) break;
    out.zeros.push_back(refine_bracket([&](double x) { return sign_functional(which, traj(x)); }, b, tol_x));
  }
  return out;
}

inline std::optional<double> conjugate_point_from(const Trajectory<8>& traj, double a, double x_max) {
  const ZeroScan z =
      subwronskian_zeros(traj, Subwronskian::sigma_p, a + scan_offset(a, x_max), locate_tolerance(a, x_max), 1);
  if (z.zeros.empty()) return std::nullopt;
  return z.zeros.front();
}

template <Coefficients C>
std::optional<double> systems_conjugate_point(const Problem<C>& pb) {
  return conjugate_point_from(fundamental_solutions(pb.coeffs, 1.0, pb.a, pb.x_max, pb.tol), pb.a, pb.x_max);
}

struct FocalPoints {
  std::optional<double> mu1;
  std::optional<double> mu2;
  std::vector<double> rho_zeros;
  std::optional<double> first_rho_zero_beyond_mu1;
};

inline FocalPoints focal_points_from(const Trajectory<8>& traj, double a, double x_max) {
  const double from = a + scan_offset(a, x_max);
  const double tol_x = locate_tolerance(a, x_max);
  FocalPoints out;
  const ZeroScan tz = subwronskian_zeros(traj, Subwronskian::tau_p, from, tol_x, 2);
  if (!tz.zeros.empty()) out.mu1 = tz.zeros[0];
  if (tz.zeros.size() > 1) out.mu2 = tz.zeros[1];
  out.rho_zeros = subwronskian_zeros(traj, Subwronskian::rho, from, tol_x).zeros;
  if (out.mu1)
    for (double z : out.rho_zeros)
      if (z > *out.mu1) {
        out.first_rho_zero_beyond_mu1 = z;
        break;
      }
  return out;
}

template <Coefficients C>
FocalPoints systems_focal_point(const Problem<C>& pb) {
  const Trajectory<8> traj = fundamental_solutions(pb.coeffs, 1.0, pb.a, pb.x_max, pb.tol);
  return focal_points_from(traj, pb.a, pb.x_max);
}

/// First zero of the auxiliary solution h (h(a) = 1, h'(a) = 0).
template <Coefficients C>
std::optional<double> second_order_conjugate_point(const Problem<C>& pb) {
  return transform::auxiliary_solution(pb.coeffs, pb.a, pb.x_max, pb.tol).first_zero();
}

struct OscillationReport {
  double a = 0.0;
  double x_max = 0.0;
  std::optional<double> eta1;
  std::optional<double> mu1;
  std::optional<double> mu2;
  std::vector<double> rho_zeros;
  std::optional<double> first_rho_zero_beyond_mu1;
  std::optional<double> eta_bar1;
  std::optional<double> rho_at_mu1;
  std::optional<double> sigma_at_mu1;
  /// Near-zero minima of sigma', tau' or rho without a sign change.
  std::vector<double> suspected_tangential;
  double residual_max = 0.0;
  std::vector<Check> orderings;
};

/// True when sigma changes sign on (lo, hi].
inline bool sigma_changes_sign(const Trajectory<8>& traj, double lo, double hi) {
  std::vector<double> grid{lo};
  for (double x : traj.mesh())
    if (x > lo && x < hi) grid.push_back(x);
  grid.push_back(hi);
  const SignScan scan = detect_sign_changes(std::span<const double>(grid), [&](double x) {
    return sign_functional(Subwronskian::sigma, traj(x));
  });
  return !scan.brackets.empty() || sign_functional(Subwronskian::sigma, traj(hi)) == 0.0;
}

inline std::string fmt_point(const std::optional<double>& v) { return v ? format_real(*v) : "absent"; }

/// Evaluates the orderings among located points that hold for every
/// admissible coefficient triple.
inline std::vector<Check> evaluate_orderings(const Trajectory<8>& traj, const OscillationReport& rep) {
  std::vector<Check> out;
  const double tol = 10.0 * locate_tolerance(rep.a, rep.x_max);
  {
    Check c{"focal_precedes_conjugate", "a < mu1 < eta1", Outcome::not_applicable,
            "mu1=" + fmt_point(rep.mu1) + " eta1=" + fmt_point(rep.eta1)};
    if (rep.eta1) c.outcome = outcome_of(rep.mu1 && rep.a < *rep.mu1 && *rep.mu1 < *rep.eta1);
    out.push_back(c);
  }
  {
    Check c{"rho_negative_at_focal_point", "rho(mu1) < 0", Outcome::not_applicable,
            "rho(mu1)=" + fmt_point(rep.rho_at_mu1)};
    if (rep.rho_at_mu1) c.outcome = outcome_of(*rep.rho_at_mu1 < 0.0);
    out.push_back(c);
  }
  {
    Check c{"conjugate_by_first_rho_zero_beyond_focal", "eta1 exists in (a, xi]", Outcome::not_applicable,
            "xi=" + fmt_point(rep.first_rho_zero_beyond_mu1) + " eta1=" + fmt_point(rep.eta1)};
    if (rep.first_rho_zero_beyond_mu1)
      c.outcome = outcome_of(rep.eta1 && *rep.eta1 <= *rep.first_rho_zero_beyond_mu1 + tol);
    out.push_back(c);
  }
  {
    Check c{"sigma_vanishes_between_focal_points", "sigma has a zero in (mu1, mu2]", Outcome::not_applicable,
            "mu1=" + fmt_point(rep.mu1) + " mu2=" + fmt_point(rep.mu2)};
    if (rep.mu1 && rep.mu2) c.outcome = outcome_of(sigma_changes_sign(traj, *rep.mu1, *rep.mu2));
    out.push_back(c);
  }
  {
    Check c{"focal_precedes_second_order_conjugate", "a < mu1 < eta_bar1 (p > 0)", Outcome::not_applicable,
            "mu1=" + fmt_point(rep.mu1) + " eta_bar1=" + fmt_point(rep.eta_bar1)};
    if (rep.eta_bar1) c.outcome = outcome_of(rep.mu1 && rep.a < *rep.mu1 && *rep.mu1 < *rep.eta_bar1);
    out.push_back(c);
  }
  return out;
}

template <Coefficients C>
OscillationReport analyze_from(const Trajectory<8>& traj, const Problem<C>& pb) {
  OscillationReport rep;
  rep.a = pb.a;
  rep.x_max = pb.x_max;
  const double from = pb.a + scan_offset(pb.a, pb.x_max);
  const double tol_x = locate_tolerance(pb.a, pb.x_max);

  const ZeroScan sz = subwronskian_zeros(traj, Subwronskian::sigma_p, from, tol_x, 1);
  if (!sz.zeros.empty()) rep.eta1 = sz.zeros.front();
  const FocalPoints fp = focal_points_from(traj, pb.a, pb.x_max);
  rep.mu1 = fp.mu1;
  rep.mu2 = fp.mu2;
  rep.rho_zeros = fp.rho_zeros;
  rep.first_rho_zero_beyond_mu1 = fp.first_rho_zero_beyond_mu1;
  if (rep.mu1) {
    const SubwronskianSample s = subwronskians_at(traj, pb.coeffs, *rep.mu1);
    rep.rho_at_mu1 = s.rho;
    rep.sigma_at_mu1 = s.sigma;
  }
  for (Subwronskian w : {Subwronskian::sigma_p, Subwronskian::tau_p, Subwronskian::rho}) {
    const ZeroScan z = subwronskian_zeros(traj, w, from, tol_x, 0);
    rep.suspected_tangential.insert(rep.suspected_tangential.end(), z.suspected.begin(), z.suspected.end());
  }
  std::sort(rep.suspected_tangential.begin(), rep.suspected_tangential.end());

  rep.eta_bar1 = transform::auxiliary_solution(pb.coeffs, pb.a, pb.x_max, pb.tol).first_zero();

  const std::vector<double> grid = uniform_grid(pb.a, pb.x_max, 200);
  for (double x : grid) {
    const SubwronskianSample s = subwronskians_at(traj, pb.coeffs, x);
    rep.residual_max = std::max(rep.residual_max, std::abs(s.identity_residual) / s.identity_scale);
  }
  rep.orderings = evaluate_orderings(traj, rep);
  return rep;
}

template <Coefficients C>
OscillationReport analyze(const Problem<C>& pb) {
  return analyze_from(fundamental_solutions(pb.coeffs, 1.0, pb.a, pb.x_max, pb.tol), pb);
}

struct EigenfunctionSample {
  double x, y, yp, ypp, Ty;
};

struct EigenfunctionReport {
  double mu1 = 0.0;
  /// u'(mu1) / v'(mu1)
  double delta1 = 0.0;
  std::vector<EigenfunctionSample> samples;
  bool y_positive = false;
  bool yp_positive = false;
  bool Ty_negative = false;
  /// Whether q <= 0 at every sample of [a, mu1).
  bool q_nonpositive = false;
  /// y'' < 0 on the samples; only claimed when q_nonpositive.
  bool ypp_negative = false;
  double boundary_yp = 0.0;
  double boundary_Ty = 0.0;
};

/// y = u - (u'/v')(mu1) v sampled on `points` interior points of (a, mu1).
/// Throws Error when v'(mu1) vanishes.
template <Coefficients C>
EigenfunctionReport focal_eigenfunction(const Trajectory<8>& traj, const C& coeffs, double a, double mu1,
                                        std::size_t points = 200) {
  const PairState end = traj(mu1);
  const QuasiState ue = u_part(end), ve = v_part(end);
  if (std::abs(ve.yp) <= 1e-14 * std::max(1.0, std::abs(ue.yp)))
    throw Error("v'(mu1) = 0 at mu1=" + format_real(mu1) + ": eigenfunction ratio undefined");

  EigenfunctionReport rep;
  rep.mu1 = mu1;
  rep.delta1 = ue.yp / ve.yp;
  auto combine = [&](const PairState& s) {
    const QuasiState u = u_part(s), v = v_part(s);
    return QuasiState{u.y - rep.delta1 * v.y, u.yp - rep.delta1 * v.yp, u.y1 - rep.delta1 * v.y1,
                      u.Ty - rep.delta1 * v.Ty};
  };
  const QuasiState ye = combine(end);
  rep.boundary_yp = std::abs(ye.yp);
  rep.boundary_Ty = std::abs(ye.Ty);

  rep.y_positive = rep.yp_positive = rep.ypp_negative = true;
  const QuasiState y0 = combine(traj(a));
  rep.Ty_negative = y0.Ty < 0.0;
  rep.q_nonpositive = coeffs.q(a) <= 0.0;
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = a + (mu1 - a) * static_cast<double>(i) / static_cast<double>(points + 1);
    const QuasiState y = combine(traj(x));
    const EigenfunctionSample s{x, y.y, y.yp, y.y1 / coeffs.r(x), y.Ty};
    rep.samples.push_back(s);
    rep.y_positive = rep.y_positive && s.y > 0.0;
    rep.yp_positive = rep.yp_positive && s.yp > 0.0;
    rep.Ty_negative = rep.Ty_negative && s.Ty < 0.0;
    rep.ypp_negative = rep.ypp_negative && s.ypp < 0.0;
    rep.q_nonpositive = rep.q_nonpositive && coeffs.q(x) <= 0.0;
  }
  return rep;
}

template <Coefficients C>
EigenfunctionReport focal_eigenfunction(const Problem<C>& pb) {
  const Trajectory<8> traj = fundamental_solutions(pb.coeffs, 1.0, pb.a, pb.x_max, pb.tol);
  const FocalPoints fp = focal_points_from(traj, pb.a, pb.x_max);
  if (!fp.mu1) throw Error("no systems-focal point on (a, x_max]");
  return focal_eigenfunction(traj, pb.coeffs, pb.a, *fp.mu1);
}

/// u, u', Tu, v, v', Tv > 0 at `points` samples of (a, mu1].
inline bool fundamental_solutions_positive(const Trajectory<8>& traj, double a, double mu1,
                                           std::size_t points = 200) {
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = a + (mu1 - a) * static_cast<double>(i) / static_cast<double>(points);
    const PairState s = traj(x);
    const QuasiState u = u_part(s), v = v_part(s);
    if (!(u.y > 0 && u.yp > 0 && u.Ty > 0 && v.y > 0 && v.yp > 0 && v.Ty > 0)) return false;
  }
  return true;
}

/// Header `x,sigma,sigma_p,tau,tau_p,rho,residual`, one row per grid point.
template <Coefficients C>
void write_trace_csv(std::ostream& os, const Trajectory<8>& traj, const C& coeffs, std::span<const double> grid) {
  os << "x,sigma,sigma_p,tau,tau_p,rho,residual\n";
  char buf[256];
  for (double x : grid) {
    const SubwronskianSample s = subwronskians_at(traj, coeffs, x);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", s.x, s.sigma, s.sigma_p, s.tau,
                  s.tau_p, s.rho, s.identity_residual);
    os << buf;
  }
}

}  // namespace oscil::oscillation
