#pragma once

// First-order formulation of (r y'')'' - (q y')' = lambda p y in
// quasi-derivatives, and an adaptive Dormand-Prince 5(4) integrator that keeps
// its continuous extension for every accepted step.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "oscil/errors.hpp"

namespace oscil {

template <std::size_t N>
using State = std::array<double, N>;

/// Anything that provides r(x), p(x), q(x).
template <class C>
concept Coefficients = requires(const C& c, double x) {
  { c.r(x) } -> std::convertible_to<double>;
  { c.p(x) } -> std::convertible_to<double>;
  { c.q(x) } -> std::convertible_to<double>;
};

struct Tolerance {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

/// (y, y', y1 = r y'', Ty = y1' - q y').
struct QuasiState {
  double y = 0.0;
  double yp = 0.0;
  double y1 = 0.0;
  double Ty = 0.0;

  State<4> to_array() const { return {y, yp, y1, Ty}; }
  static QuasiState from(const double* s) { return {s[0], s[1], s[2], s[3]}; }

  friend bool operator==(const QuasiState&, const QuasiState&) = default;
};

/// y' = yp, yp' = y1/r, y1' = Ty + q yp, Ty' = lambda p y.
template <Coefficients C>
class QuasiDerivativeField {
 public:
  QuasiDerivativeField(const C& coeffs, double lambda) : coeffs_(&coeffs), lambda_(lambda) {}

  QuasiState derivative(double x, const QuasiState& s) const {
    return {s.yp, s.y1 / coeffs_->r(x), s.Ty + coeffs_->q(x) * s.yp, lambda_ * coeffs_->p(x) * s.y};
  }

  State<4> operator()(double x, const State<4>& s) const {
    return derivative(x, QuasiState::from(s.data())).to_array();
  }

  /// Joint field for the pair (u, v) laid out as [u.., v..]; coefficients
  /// are evaluated once per call.
  State<8> operator()(double x, const State<8>& s) const {
    const double r = coeffs_->r(x);
    const double q = coeffs_->q(x);
    const double lp = lambda_ * coeffs_->p(x);
    return {s[1], s[2] / r, s[3] + q * s[1], lp * s[0],
            s[5], s[6] / r, s[7] + q * s[5], lp * s[4]};
  }

  double lambda() const { return lambda_; }

 private:
  const C* coeffs_;
  double lambda_;
};

template <Coefficients C>
QuasiDerivativeField<C> to_first_order(const C& coeffs, double lambda = 1.0) {
  return QuasiDerivativeField<C>(coeffs, lambda);
}

/// Dense solution over [start, end]: the accepted mesh plus one quartic
/// continuous extension per step. Immutable once built.
template <std::size_t N>
class Trajectory {
 public:
  struct Segment {
    double x0;
    double h;
    std::array<State<N>, 5> coeff;
  };

  Trajectory(std::vector<double> mesh, std::vector<Segment> segments, Tolerance tol)
      : mesh_(std::move(mesh)), segments_(std::move(segments)), tol_(tol) {}

  double start() const { return mesh_.front(); }
  double end() const { return mesh_.back(); }
  const std::vector<double>& mesh() const { return mesh_; }
  const Tolerance& tolerance() const { return tol_; }
  std::size_t steps() const { return segments_.size(); }

  bool contains(double x) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(end() - start()));
    return x >= start() - slack && x <= end() + slack;
  }

  State<N> operator()(double x) const {
    if (!contains(x))
      throw InvalidArgument("x=" + format_real(x) + " outside trajectory span [" + format_real(start()) +
                            ", " + format_real(end()) + "]");
    if (x <= start()) return segments_.front().coeff[0];
    if (x >= end()) return back();
    auto it = std::upper_bound(mesh_.begin(), mesh_.end(), x);
    const auto& seg = segments_[static_cast<std::size_t>(it - mesh_.begin()) - 1];
    const double th = (x - seg.x0) / seg.h;
    const double th1 = 1.0 - th;
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      const auto& c = seg.coeff;
      out[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
    }
    return out;
  }

  State<N> back() const {
    const auto& c = segments_.back().coeff;
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = c[0][i] + c[1][i];
    return out;
  }

 private:
  std::vector<double> mesh_;
  std::vector<Segment> segments_;
  Tolerance tol_;
};

namespace detail {

// Dormand-Prince 5(4) tableau with Shampine's dense output, as in Hairer's DOPRI5.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N>
double error_norm(const State<N>& e, const State<N>& y0, const State<N>& y1, const Tolerance& tol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = tol.atol + tol.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = e[i] / sk;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(N));
}

template <std::size_t N, class Field>
double initial_step(Field& f, double x0, const State<N>& y0, const State<N>& f0, double span,
                    const Tolerance& tol) {
  auto norm = [&](const State<N>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = tol.atol + tol.rtol * std::abs(y0[i]);
      acc += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(acc / static_cast<double>(N));
  };
  const double d0 = norm(y0);
  const double d1 = norm(f0);
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min({h, span, tol.max_step});
  State<N> y1{};
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h * f0[i];
  const State<N> f1 = f(x0 + h, y1);
  State<N> df{};
  for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - f0[i];
  const double d2 = norm(df) / h;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h, h1, span, tol.max_step});
}

}  // namespace detail

/// Integrates y' = f(x, y) from (x0, y0) to x1 > x0 with mixed
/// absolute/relative local error control. Throws IntegrationError on step
/// size underflow or step budget exhaustion; field errors propagate.
template <std::size_t N, class Field>
Trajectory<N> integrate(Field&& f, double x0, const State<N>& y0, double x1, const Tolerance& tol = {}) {
  using T = detail::Dopri5;
  if (!(x1 > x0) || !std::isfinite(x0) || !std::isfinite(x1))
    throw InvalidArgument("integration span must be finite with end > start");
  if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw InvalidArgument("tolerances must be positive");

  std::vector<double> mesh{x0};
  std::vector<typename Trajectory<N>::Segment> segments;

  double x = x0;
  State<N> y = y0;
  State<N> k1 = f(x, y);
  double h = detail::initial_step<N>(f, x0, y0, k1, x1 - x0, tol);
  bool last_rejected = false;

  State<N> k2, k3, k4, k5, k6, k7, ys, y_new;
  auto stage = [&](State<N>& out, auto&& combine) {
    for (std::size_t i = 0; i < N; ++i) out[i] = combine(i);
  };

  for (std::size_t step = 0;; ++step) {
    if (step >= tol.max_steps) throw IntegrationError("step budget exhausted at x=" + format_real(x));
    bool final_step = false;
    if (x + h >= x1 || x1 - (x + h) < 1e-9 * h) {
      h = x1 - x;
      final_step = true;
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
      throw IntegrationError("step size underflow at x=" + format_real(x));

    stage(ys, [&](std::size_t i) { return y[i] + h * T::a21 * k1[i]; });
    k2 = f(x + T::c2 * h, ys);
    stage(ys, [&](std::size_t i) { return y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]); });
    k3 = f(x + T::c3 * h, ys);
    stage(ys, [&](std::size_t i) { return y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]); });
    k4 = f(x + T::c4 * h, ys);
    stage(ys, [&](std::size_t i) {
      return y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    });
    k5 = f(x + T::c5 * h, ys);
    stage(ys, [&](std::size_t i) {
      return y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] + T::a65 * k5[i]);
    });
    const double x_new = final_step ? x1 : x + h;
    k6 = f(x_new, ys);
    stage(y_new, [&](std::size_t i) {
      return y[i] + h * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] + T::a75 * k5[i] + T::a76 * k6[i]);
    });
    k7 = f(x_new, y_new);

    State<N> err{};
    stage(err, [&](std::size_t i) {
      return h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
    });
    const double en = detail::error_norm<N>(err, y, y_new, tol);
    if (!std::isfinite(en)) throw IntegrationError("non-finite solution at x=" + format_real(x));

    if (en <= 1.0) {
      typename Trajectory<N>::Segment seg{x, h, {}};
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y_new[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.coeff[0][i] = y[i];
        seg.coeff[1][i] = ydiff;
        seg.coeff[2][i] = bspl;
        seg.coeff[3][i] = ydiff - h * k7[i] - bspl;
        seg.coeff[4][i] = h * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] +
                               T::d6 * k6[i] + T::d7 * k7[i]);
      }
      segments.push_back(seg);
      x = x_new;
      mesh.push_back(x);
      y = y_new;
      k1 = k7;
      if (final_step) break;
      double fac = en == 0.0 ? 10.0 : 0.9 * std::pow(en, -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
      h = std::min(h * fac, tol.max_step);
      last_rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  return Trajectory<N>(std::move(mesh), std::move(segments), tol);
}

}  // namespace oscil
