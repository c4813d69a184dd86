#pragma once

#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace oscil {

using GaussRule8 = boost::math::quadrature::gauss<double, 8>;

/// Composite Gauss-Legendre rule: `panels` equal panels of 8 points each.
template <class F>
double integrate_gl(F&& f, double a, double b, int panels = 64) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == panels ? b : lo + h;
    sum += GaussRule8::integrate(f, lo, hi);
  }
  return sum;
}

/// Nodes and weights of the same composite rule, for assembling matrices.
inline std::vector<std::pair<double, double>> gl_nodes(double a, double b, int panels = 64) {
  const auto& xs = GaussRule8::abscissa();
  const auto& ws = GaussRule8::weights();
  std::vector<std::pair<double, double>> out;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * h, half = 0.5 * h;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (xs[j] == 0.0) {
        out.emplace_back(mid, half * ws[j]);
        continue;
      }
      out.emplace_back(mid - half * xs[j], half * ws[j]);
      out.emplace_back(mid + half * xs[j], half * ws[j]);
    }
  }
  return out;
}

}  // namespace oscil
