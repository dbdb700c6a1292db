#include "flowgrowth/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace flowgrowth::moments {

namespace {

constexpr double kOverflowGuard = 1e300;

void check_constants(double c1, double c2) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) {
    throw std::invalid_argument("Gronwall constants must be non-negative");
  }
}

}  // namespace

double log_gronwall_factor(double c1, double c2, double t) {
  check_constants(c1, c2);
  if (t < 0.0) throw std::invalid_argument("Gronwall bound: t must be >= 0");
  const double root = std::sqrt(c2);
  const double rate = c1 + 2.0 * root;
  if (rate == 0.0) return 0.0;
  const double ratio = (c1 + root) / rate;
  const double x = rate * t;
  if (x < 30.0) return std::log1p(ratio * std::expm1(x));
  return x + std::log(ratio + (1.0 - ratio) * std::exp(-x));
}

double gronwall_bound(double c1, double c2, double h_at_t, double t) {
  if (h_at_t == 0.0) return 0.0;
  return h_at_t * std::exp(log_gronwall_factor(c1, c2, t));
}

double gronwall_bound(double c1, double c2, const MomentCurve& h, double t) {
  return std::exp(h.log_at(t) + log_gronwall_factor(c1, c2, t));
}

PicardResult gronwall_picard_oracle(double c1, double c2, const MomentCurve& h, int grid_size,
                                    int iterations) {
  check_constants(c1, c2);
  if (grid_size < 64) throw std::invalid_argument("Picard oracle: grid_size must be >= 64");
  if (iterations < 8) throw std::invalid_argument("Picard oracle: iterations must be >= 8");
  h.validate();

  const auto n = static_cast<std::size_t>(grid_size);
  const double horizon = h.horizon();
  const double step = horizon / static_cast<double>(n - 1);
  std::vector<double> times(n);
  std::vector<double> forcing(n);
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = i + 1 == n ? horizon : step * static_cast<double>(i);
    forcing[i] = h.value_at(times[i]);
  }

  PicardResult out;
  std::vector<double> f = forcing;
  std::vector<double> next(n);
  for (int it = 1; it <= iterations; ++it) {
    double lin = 0.0;
    double root = 0.0;
    double change = 0.0;
    next[0] = forcing[0];
    for (std::size_t i = 1; i < n; ++i) {
      lin += 0.5 * step * (f[i - 1] + f[i]);
      root += 0.5 * step * (std::sqrt(f[i - 1]) + std::sqrt(f[i]));
      next[i] = c1 * lin + c2 * root * root + forcing[i];
      if (!(next[i] < kOverflowGuard)) {
        throw DivergenceError("Picard iteration diverged at t = " + std::to_string(times[i]),
                              times[i]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      change = std::max(change, std::abs(next[i] - f[i]) / std::max(1.0, std::abs(next[i])));
    }
    f.swap(next);
    out.iterations = it;
    if (change < 1e-10) {
      out.converged = true;
      break;
    }
  }

  out.curve.grid = std::move(times);
  out.curve.log_values.resize(n);
  std::transform(f.begin(), f.end(), out.curve.log_values.begin(),
                 [](double v) { return std::log(v); });
  out.curve.label = "picard fixed point";
  return out;
}

}  // namespace flowgrowth::moments
