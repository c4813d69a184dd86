#pragma once

// The auxiliary second-order equation (r h')' - q h = 0 with h(a) = 1,
// h'(a) = 0, integrated together with t(x) = integral of h from a.

#include <algorithm>
#include <optional>
#include <utility>

#include "oscil/ivp.hpp"
#include "oscil/scan.hpp"

namespace oscil::transform {

/// State layout: [h, w = r h', t].
class AuxiliarySolution {
 public:
  AuxiliarySolution(Trajectory<3> traj, std::optional<double> first_zero)
      : traj_(std::move(traj)), first_zero_(first_zero) {}

  double a() const { return traj_.start(); }
  double x_max() const { return traj_.end(); }
  const Trajectory<3>& trajectory() const { return traj_; }

  double h(double x) const { return traj_(x)[0]; }
  double w(double x) const { return traj_(x)[1]; }
  double t(double x) const { return traj_(x)[2]; }

  /// First sign change of h on (a, x_max], refined.
  std::optional<double> first_zero() const { return first_zero_; }

  /// End of the interval [a, x] on which h > 0: the first zero of h, or
  /// x_max when none was detected.
  double positivity_end() const { return first_zero_.value_or(x_max()); }

 private:
  Trajectory<3> traj_;
  std::optional<double> first_zero_;
};

template <Coefficients C>
AuxiliarySolution auxiliary_solution(const C& coeffs, double a, double x_max, Tolerance tol = {}) {
  tol.max_step = std::min(tol.max_step, (x_max - a) / 64.0);
  auto field = [&](double x, const State<3>& s) -> State<3> {
    return {s[1] / coeffs.r(x), coeffs.q(x) * s[0], s[0]};
  };
  Trajectory<3> traj = integrate<3>(field, a, State<3>{1.0, 0.0, 0.0}, x_max, tol);
  const SignScan scan = detect_sign_changes(traj, [](double, const State<3>& s) { return s[0]; }, a);
  std::optional<double> zero;
  if (!scan.brackets.empty()) {
    const double tol_x = 1e-12 * std::max(1.0, x_max - a);
    zero = refine_bracket([&](double x) { return traj(x)[0]; }, scan.brackets.front(), tol_x);
  }
  return AuxiliarySolution(std::move(traj), zero);
}

}  // namespace oscil::transform
