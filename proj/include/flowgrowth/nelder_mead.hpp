#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace flowgrowth {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex with the standard reflection/expansion/contraction/shrink
/// coefficients (1, 2, 1/2, 1/2). Stops when the spread of vertex values
/// falls below `ftol` (relative to max(1, |best|)) or after `max_evals`
/// objective calls; `max_evals` is never exceeded.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, double step, int max_evals,
                                 double ftol = 1e-12) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  SimplexResult out;
  // Past the budget a trial point is simply never accepted.
  auto eval = [&](const std::vector<double>& x) {
    if (out.evaluations >= max_evals) return HUGE_VAL;
    ++out.evaluations;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n);
  auto along = [&](double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (pts[order[n]][j] - centroid[j]);
    return x;
  };

  while (out.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const double best = vals[order[0]];
    const double worst = vals[order[n]];
    if (std::abs(worst - best) <= ftol * std::max(1.0, std::abs(best))) {
      out.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[order[i]][j] / n;
    }
    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < best) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[order[n]] = xe;
        vals[order[n]] = fe;
      } else {
        pts[order[n]] = xr;
        vals[order[n]] = fr;
      }
      continue;
    }
    if (fr < vals[order[n - 1]]) {
      pts[order[n]] = xr;
      vals[order[n]] = fr;
      continue;
    }
    const bool outside = fr < worst;
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : worst)) {
      pts[order[n]] = xc;
      vals[order[n]] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i <= n; ++i) {
      auto& p = pts[order[i]];
      for (std::size_t j = 0; j < n; ++j) p[j] = pts[order[0]][j] + 0.5 * (p[j] - pts[order[0]][j]);
      vals[order[i]] = eval(p);
    }
  }
  const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  out.x = pts[best];
  out.value = vals[best];
  return out;
}

}  // namespace flowgrowth
