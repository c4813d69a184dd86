#pragma once

// Sign-change scanning over a base grid with local refinement, and
// bracketed root refinement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "oscil/ivp.hpp"

namespace oscil {

struct Bracket {
  double lo;
  double hi;
  double g_lo;
  double g_hi;
};

struct SignScan {
  /// Intervals with g(lo) * g(hi) < 0, increasing.
  std::vector<Bracket> brackets;
  /// Local minima of |g| below `tangent_ratio * scale` with no sign change.
  /// Tangential zeros are never reported as brackets.
  std::vector<double> suspected;
  double scale = 0.0;
};

struct ScanOptions {
  int samples_per_cell = 4;
  int refined_samples_per_cell = 32;
  /// A cell is resampled when some |g| falls below this fraction of the
  /// running maximum.
  double refine_ratio = 1e-2;
  double tangent_ratio = 1e-10;
};

/// Scans g over `grid` (strictly increasing).
template <class G>
SignScan detect_sign_changes(std::span<const double> grid, G&& g, const ScanOptions& opt = {}) {
  SignScan out;
  if (grid.size() < 2) return out;

  std::vector<std::pair<double, double>> samples;
  double scale = 0.0;
  auto sample = [&](double x) {
    const double v = g(x);
    scale = std::max(scale, std::abs(v));
    samples.emplace_back(x, v);
    return v;
  };

  sample(grid[0]);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double lo = grid[i];
    const double hi = grid[i + 1];
    const std::size_t cell_begin = samples.size();
    const double g_lo = samples.back().second;
    bool small = std::abs(g_lo) < opt.refine_ratio * scale;
    for (int j = 1; j <= opt.samples_per_cell; ++j) {
      const double v = sample(lo + (hi - lo) * j / opt.samples_per_cell);
      small = small || std::abs(v) < opt.refine_ratio * scale;
    }
    if (small && opt.refined_samples_per_cell > opt.samples_per_cell) {
      samples.resize(cell_begin);
      for (int j = 1; j <= opt.refined_samples_per_cell; ++j) sample(lo + (hi - lo) * j / opt.refined_samples_per_cell);
    }
  }
  out.scale = scale;

  // Exact zeros are skipped: a bracket joins the nearest non-zero samples.
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = samples[i].second;
    if (v == 0.0) continue;
    if (last && std::signbit(v) != std::signbit(samples[*last].second))
      out.brackets.push_back({samples[*last].first, samples[i].first, samples[*last].second, v});
    last = i;
  }

  const double tangent = opt.tangent_ratio * std::max(scale, 1e-300);
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const double a = samples[i - 1].second, b = samples[i].second, c = samples[i + 1].second;
    if (std::abs(b) < tangent && std::abs(b) <= std::abs(a) && std::abs(b) <= std::abs(c) &&
        !std::signbit(a * c) && a != 0.0 && c != 0.0)
      out.suspected.push_back(samples[i].first);
  }
  return out;
}

/// Scans g(x, state) along a trajectory from `x_start`, using the
/// integrator mesh as the base grid.
template <std::size_t N, class G>
SignScan detect_sign_changes(const Trajectory<N>& traj, G&& g, double x_start, const ScanOptions& opt = {}) {
  std::vector<double> grid{x_start};
  for (double x : traj.mesh())
    if (x > x_start) grid.push_back(x);
  return detect_sign_changes(std::span<const double>(grid), [&](double x) { return g(x, traj(x)); }, opt);
}

/// Refines a sign-change bracket until its width is at most `tol_x`;
/// returns the midpoint of the final bracket.
template <class G>
double refine_bracket(G&& g, const Bracket& b, double tol_x) {
  if (b.hi - b.lo <= tol_x) return 0.5 * (b.lo + b.hi);
  std::uintmax_t max_iter = 200;
  auto stop = [tol_x](double lo, double hi) { return std::abs(hi - lo) <= tol_x; };
  const auto [lo, hi] =
      boost::math::tools::toms748_solve([&](double x) { return g(x); }, b.lo, b.hi, b.g_lo, b.g_hi, stop, max_iter);
  return 0.5 * (lo + hi);
}

/// Earliest refined zero among `brackets`, if any.
template <class G>
std::optional<double> first_zero(G&& g, std::span<const Bracket> brackets, double tol_x) {
  if (brackets.empty()) return std::nullopt;
  return refine_bracket(g, brackets.front(), tol_x);
}

}  // namespace oscil
