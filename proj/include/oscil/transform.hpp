#pragma once

// Change of independent variable t(x) = integral of h from a, where h solves
// the auxiliary equation. In t the fourth-order equation loses its middle
// term: (r h^3 y..)'' = lambda (p / h) y.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "oscil/auxiliary.hpp"
#include "oscil/oscillation.hpp"

namespace oscil::transform {

template <Coefficients C>
class TransformedProblem {
 public:
  TransformedProblem(C coeffs, std::shared_ptr<const AuxiliarySolution> aux, double x_end)
      : coeffs_(std::move(coeffs)), aux_(std::move(aux)), x_end_(x_end) {
    for (double x : aux_->trajectory().mesh()) {
      if (x >= x_end_) break;
      xs_.push_back(x);
    }
    xs_.push_back(x_end_);
    for (double x : xs_) {
      ts_.push_back(aux_->t(x));
      hs_.push_back(aux_->h(x));
    }
    for (std::size_t i = 1; i < ts_.size(); ++i)
      if (!(ts_[i] > ts_[i - 1])) throw Error("t(x) is not strictly increasing near x=" + format_real(xs_[i]));
  }

  const AuxiliarySolution& auxiliary() const { return *aux_; }
  const C& original() const { return coeffs_; }
  double a() const { return xs_.front(); }
  double x_end() const { return x_end_; }
  double t_end() const { return ts_.back(); }
  std::size_t mesh_steps() const { return xs_.size() - 1; }

  double t_of_x(double x) const { return aux_->t(x); }

  /// Inverse of t(x): Hermite guess on the mesh with slopes 1/h, then
  /// bracketed Newton on the dense t(x).
  double x_of_t(double t) const {
    if (t < -1e-14 * std::max(1.0, t_end()) || t > t_end() * (1 + 1e-14))
      throw InvalidArgument("t=" + format_real(t) + " outside [0, " + format_real(t_end()) + "]");
    t = std::clamp(t, 0.0, t_end());
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    std::size_t i = it == ts_.begin() ? 0 : static_cast<std::size_t>(it - ts_.begin()) - 1;
    if (i + 1 >= ts_.size()) return xs_.back();
    const double t0 = ts_[i], t1 = ts_[i + 1], x0 = xs_[i], x1 = xs_[i + 1];
    if (t == t0) return x0;
    const double dt = t1 - t0, s = (t - t0) / dt;
    double guess = x0 + s * (x1 - x0);
    if (hs_[i] > 1e-3 && hs_[i + 1] > 1e-3) {
      const double m0 = dt / hs_[i], m1 = dt / hs_[i + 1];
      const double s2 = s * s, s3 = s2 * s;
      guess = (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * m1;
      guess = std::clamp(guess, x0, x1);
    }
    std::uintmax_t iters = 60;
    auto f = [&](double x) {
      const auto st = aux_->trajectory()(x);
      return std::make_pair(st[2] - t, st[0]);
    };
    return boost::math::tools::newton_raphson_iterate(f, guess, x0, x1, std::numeric_limits<double>::digits - 4,
                                                      iters);
  }

  double h_of_t(double t) const { return aux_->h(x_of_t(t)); }
  /// dh/dt = h'(x) / h = w / (r h).
  double hdot_of_t(double t) const {
    const double x = x_of_t(t);
    const auto st = aux_->trajectory()(x);
    return st[1] / (coeffs_.r(x) * st[0]);
  }

  // Transformed coefficients as functions of t.
  double r(double t) const {
    const double x = x_of_t(t), h = aux_->h(x);
    return coeffs_.r(x) * h * h * h;
  }
  double p(double t) const {
    const double x = x_of_t(t);
    return coeffs_.p(x) / aux_->h(x);
  }
  double q(double) const { return 0.0; }

  /// Quasi-derivatives of the same solution in t, from its values in x.
  QuasiState push(double x, const QuasiState& s) const {
    const auto st = aux_->trajectory()(x);
    const double h = st[0], w = st[1];
    return {s.y, s.yp / h, h * s.y1 - w * s.yp, s.Ty};
  }

 private:
  C coeffs_;
  std::shared_ptr<const AuxiliarySolution> aux_;
  double x_end_;
  std::vector<double> xs_, ts_, hs_;
};

/// Restricts to the positivity interval of h. x_end, when given, must lie
/// inside it.
template <Coefficients C>
TransformedProblem<C> change_of_variables(const C& coeffs, std::shared_ptr<const AuxiliarySolution> aux,
                                          std::optional<double> x_end = std::nullopt) {
  const double end = x_end.value_or(aux->positivity_end());
  if (end > aux->positivity_end())
    throw InvalidArgument("transform end x=" + format_real(end) + " beyond positivity of h at x=" +
                          format_real(aux->positivity_end()));
  const auto& mesh = aux->trajectory().mesh();
  const auto steps = static_cast<std::size_t>(std::lower_bound(mesh.begin(), mesh.end(), end) - mesh.begin());
  if (steps < 10)
    throw InvalidArgument("positivity interval of h too small: " + std::to_string(steps) + " mesh steps before x=" +
                          format_real(end));
  return TransformedProblem<C>(coeffs, std::move(aux), end);
}

template <Coefficients C>
TransformedProblem<C> change_of_variables(const Problem<C>& pb) {
  auto aux = std::make_shared<const AuxiliarySolution>(auxiliary_solution(pb.coeffs, pb.a, pb.x_max, pb.tol));
  return change_of_variables(pb.coeffs, std::move(aux));
}

struct TransformResiduals {
  double derivative = 0;     // y. against y'/h
  double third_quasi = 0;    // (R y..). against (r y'')' - q y'
  double sigma = 0;          // sigma against h sigma~
  double tau = 0;            // tau against tau~
  double tau_p = 0;          // tau' against h tau~.
  double sigma_p = 0;        // sigma' against h^2 sigma~. + h h. sigma~
  double consistency = 0;    // d/dx(h y1 - w y') against h Ty
  /// Largest magnitude among the compared original-side quantities.
  double scale = 0;
  double worst() const {
    return std::max({derivative, third_quasi, sigma, tau, tau_p, sigma_p, consistency});
  }
};

/// Integrates the transformed pair from t = 0 and compares it with the
/// original pair on a uniform grid of [a, grid_end].
template <Coefficients C>
TransformResiduals verify_transform_relations(const TransformedProblem<C>& tp, const Trajectory<8>& original,
                                              double grid_end, std::size_t points = 50, double lambda = 1.0,
                                              Tolerance tol = {}) {
  if (grid_end > tp.x_end()) throw InvalidArgument("grid end x=" + format_real(grid_end) + " beyond transform domain");
  if (grid_end > original.end()) throw InvalidArgument("grid end beyond the original trajectory");
  const auto& c = tp.original();
  const double t_hi = tp.t_of_x(grid_end);
  const auto tilde = oscillation::fundamental_solutions(tp, lambda, 0.0, t_hi, tol);
  const auto& aux = tp.auxiliary();
  TransformResiduals res;
  auto upd = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };
  const auto grid = oscillation::uniform_grid(tp.a(), grid_end, points);
  const double fd = 1e-4 * (grid_end - tp.a());
  for (double x : grid) {
    const double t = std::min(tp.t_of_x(x), t_hi);
    const auto so = original(x);
    const auto st = tilde(t);
    for (int k = 0; k < 2; ++k) {
      const auto pushed = tp.push(x, QuasiState::from(so.data() + 4 * k));
      const auto have = QuasiState::from(st.data() + 4 * k);
      upd(res.derivative, have.yp - pushed.yp);
      upd(res.third_quasi, have.Ty - pushed.Ty);
    }
    const auto ax = aux.trajectory()(x);
    const double h = ax[0], w = ax[1], r = c.r(x);
    const auto wo = oscillation::subwronskians(x, so, r);
    const auto wt = oscillation::subwronskians(t, st, tp.r(t));
    const double hdot = w / (r * h);
    for (double v : {wo.sigma, wo.sigma_p, wo.tau, wo.tau_p, so[1], so[3], so[5], so[7]}) upd(res.scale, v);
    upd(res.sigma, wo.sigma - h * wt.sigma);
    upd(res.tau, wo.tau - wt.tau);
    upd(res.tau_p, wo.tau_p - h * wt.tau_p);
    upd(res.sigma_p, wo.sigma_p - (h * h * wt.sigma_p + h * hdot * wt.sigma));

    // d/dx of h y1 - w y' by fourth-order differences, one-sided at the ends.
    for (int k = 0; k < 2; ++k) {
      const int o = 4 * k;
      auto g = [&](double s) {
        const auto so_s = original(s);
        const auto ax_s = aux.trajectory()(s);
        return ax_s[0] * so_s[o + 2] - ax_s[1] * so_s[o + 1];
      };
      const double dg = x - 2 * fd < tp.a()      ? (-25 * g(x) + 48 * g(x + fd) - 36 * g(x + 2 * fd) +
                                                   16 * g(x + 3 * fd) - 3 * g(x + 4 * fd)) / (12 * fd)
                        : x + 2 * fd > grid_end ? (25 * g(x) - 48 * g(x - fd) + 36 * g(x - 2 * fd) -
                                                   16 * g(x - 3 * fd) + 3 * g(x - 4 * fd)) / (12 * fd)
                                                : (g(x - 2 * fd) - 8 * g(x - fd) + 8 * g(x + fd) - g(x + 2 * fd)) /
                                                      (12 * fd);
      upd(res.consistency, dg - h * so[o + 3]);
    }
  }
  return res;
}

struct PointTransport {
  double mu1 = 0;
  double t_of_mu1 = 0;
  std::optional<double> tilde_mu1;
  double mismatch() const { return tilde_mu1 ? std::abs(*tilde_mu1 - t_of_mu1) : INFINITY; }
};

/// The first focal point of the transformed pair, compared with t(mu1).
/// Empty when h vanishes before or shortly after mu1.
template <Coefficients C>
std::optional<PointTransport> transport_focal_point(const TransformedProblem<C>& tp, double mu1, Tolerance tol = {}) {
  // p / h blows up at a zero of h, so stay clear of one.
  const double limit = tp.auxiliary().first_zero() ? tp.a() + 0.95 * (tp.x_end() - tp.a()) : tp.x_end();
  if (mu1 >= limit) return std::nullopt;
  const double x_hi = std::min(limit, mu1 + 0.25 * (mu1 - tp.a()));
  const double t_hi = tp.t_of_x(x_hi);
  const auto tilde = oscillation::fundamental_solutions(tp, 1.0, 0.0, t_hi, tol);
  PointTransport out;
  out.mu1 = mu1;
  out.t_of_mu1 = tp.t_of_x(mu1);
  out.tilde_mu1 = oscillation::focal_points_from(tilde, 0.0, t_hi).mu1;
  return out;
}

template <Coefficients C>
void write_transform_csv(std::ostream& os, const TransformedProblem<C>& tp, std::span<const double> grid) {
  os << "x,t,h\n";
  char buf[96];
  for (double x : grid) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", x, tp.t_of_x(x), tp.auxiliary().h(x));
    os << buf;
  }
}

}  // namespace oscil::transform
