#include "flowgrowth/moment_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "flowgrowth/gronwall.hpp"

namespace flowgrowth::moments {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBurkholderK5Squared = 20.0;

bool exponent_ok(double v) { return v == kInf || (std::isfinite(v) && v > 1.0); }

double reciprocal(double v) { return v == kInf ? 0.0 : 1.0 / v; }

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(coef) + term, with coef == 0 meaning the term vanishes regardless of
// whether `term` is finite.
double log_scaled(double coef, double term) {
  if (coef == 0.0) return -kInf;
  return std::log(coef) + term;
}

}  // namespace

void CharacteristicBounds::validate() const {
  for (double v : {k1, k2, k3, k4, lambda_cap, sigma, c_bar}) {
    if (!std::isfinite(v)) throw std::invalid_argument("characteristic bounds must be finite");
  }
  if (k1 < 0 || k2 < 0 || k3 < 0 || k4 < 0) {
    throw std::invalid_argument("k1..k4 must be non-negative");
  }
  if (sigma < 0) throw std::invalid_argument("sigma must be non-negative");
  if (!(c_bar > 0)) throw std::invalid_argument("c_bar must be positive");
  if (d < 2) throw std::invalid_argument("d must be >= 2");
}

void HoelderSplit::validate() const {
  for (double v : {alpha1, alpha2, alpha3, beta1, beta2, beta3, beta4}) {
    if (!exponent_ok(v)) throw std::invalid_argument("Hoelder exponents must exceed 1");
  }
  const double a = reciprocal(alpha1) + reciprocal(alpha2) + reciprocal(alpha3);
  const double b = reciprocal(beta1) + reciprocal(beta2) + reciprocal(beta3) + reciprocal(beta4);
  if (std::abs(a - 1.0) > 1e-12 || std::abs(b - 1.0) > 1e-12) {
    throw std::invalid_argument("Hoelder exponents: reciprocals must sum to 1");
  }
}

HoelderSplit HoelderSplit::from_free(double alpha2, double alpha3, double beta1, double beta3) {
  const double a_slack = 1.0 - 1.0 / alpha2 - 1.0 / alpha3;
  const double b_slack = 1.0 - 1.0 / beta1 - 1.0 / beta3;
  if (a_slack < -1e-15 || b_slack < -1e-15) {
    throw std::invalid_argument("Hoelder split: free reciprocals exceed 1");
  }
  HoelderSplit hs{};
  hs.alpha2 = alpha2;
  hs.alpha3 = alpha3;
  hs.alpha1 = a_slack <= 0.0 ? kInf : 1.0 / a_slack;
  hs.beta1 = beta1;
  hs.beta3 = beta3;
  hs.beta2 = hs.beta4 = b_slack <= 0.0 ? kInf : 2.0 / b_slack;
  hs.validate();
  return hs;
}

double burkholder_bound(double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("Burkholder bound requires p >= 2");
  return 2.0 * std::sqrt(5.0) * std::sqrt(p);
}

std::pair<double, double> sigma_lambda_from_lipschitz(double a_tilde, double b_tilde, int d) {
  if (a_tilde < 0.0 || b_tilde < 0.0) {
    throw std::invalid_argument("Lipschitz bounds must be non-negative");
  }
  return {a_tilde, b_tilde + (d - 1) * a_tilde * a_tilde / 2.0};
}

double log_f_bound(const CharacteristicBounds& cb, const HoelderSplit& hs, double p, double t) {
  cb.validate();
  if (t < 0.0) throw std::invalid_argument("f bound: t must be >= 0");
  const double cp2 = std::pow(burkholder_bound(p), 2.0);
  const double dbar = std::pow(static_cast<double>(cb.d), 2.0 - 1.0 / p);
  const double linear = hs.alpha2 * dbar * dbar * cb.k1 * cp2;
  const double squared = hs.alpha3 * dbar * dbar * cb.k3 * cb.k3;
  if (hs.alpha1 == kInf) return kInf;
  return 0.5 * (std::log(hs.alpha1) + log_gronwall_factor(linear, squared, t));
}

double f_bound(const CharacteristicBounds& cb, const HoelderSplit& hs, double p, double t) {
  return std::exp(log_f_bound(cb, hs, p, t));
}

MomentCurve f_bound_curve(const CharacteristicBounds& cb, const HoelderSplit& hs, double p,
                          double horizon, int intervals) {
  if (!(horizon > 0.0) || intervals < 1) {
    throw std::invalid_argument("f bound curve: need horizon > 0 and intervals >= 1");
  }
  auto curve = MomentCurve::tabulate(
      horizon, intervals, [&](double t) { return log_f_bound(cb, hs, p, t); },
      "f_bound p=" + format_double(p));
  curve.validate();
  return curve;
}

namespace {

// Cumulative log-integrals of exp(log_fn) at nodes i*h, Simpson with m
// sub-panels per interval.
template <typename LogFn>
std::vector<double> cumulative_log_integral(LogFn&& log_fn, double h, int intervals, int m) {
  std::vector<double> out(intervals + 1, -kInf);
  const double sub = h / m;
  const double log_weight = std::log(sub / 6.0);
  const double log4 = std::log(4.0);
  double acc = -kInf;
  double left = log_fn(0.0);
  for (int i = 0; i < intervals; ++i) {
    for (int j = 0; j < m; ++j) {
      const double a = i * h + j * sub;
      const double right = log_fn(a + sub);
      const double mid = log_fn(a + 0.5 * sub);
      acc = log_add(acc, log_weight + log_add(log_add(left, log4 + mid), right));
      left = right;
    }
    out[i + 1] = acc;
  }
  return out;
}

double max_log_change(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isinf(a[i]) || std::isinf(b[i])) {
      if (a[i] != b[i]) return kInf;
      continue;
    }
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

MomentCurve g_bound(const CharacteristicBounds& cb, const HoelderSplit& hs, double p,
                    double separation, double horizon, int grid_size,
                    const GBoundOptions& options) {
  cb.validate();
  hs.validate();
  if (grid_size < 256) throw std::invalid_argument("g bound: grid_size must be >= 256");
  if (!(horizon > 0.0)) throw std::invalid_argument("g bound: horizon must be > 0");
  if (!(separation >= 0.0)) throw std::invalid_argument("g bound: separation must be >= 0");

  const double d = cb.d;
  const double cp2 = std::pow(burkholder_bound(p), 2.0);
  const double rate = cb.lambda_cap + p * cb.sigma * cb.sigma;
  const double first_coef = cp2 * hs.beta2 * cb.k2;
  const double second_coef = hs.beta4 * cb.k4 * cb.k4;
  if ((cb.k2 > 0.0 && hs.beta2 == kInf) || (cb.k4 > 0.0 && hs.beta4 == kInf)) {
    throw std::invalid_argument("g bound: beta_2 / beta_4 must be finite when k2 / k4 > 0");
  }

  // The one-point moment of order 2p stands in for its sup-free version.
  const auto log_f2p = [&](double s) { return log_f_bound(cb, hs, 2.0 * p, s); };
  const auto first = [&](double s) { return 2.0 * log_f2p(s) + 2.0 * rate * s; };
  const auto second = [&](double s) { return log_f2p(s) + rate * s; };

  const double h = horizon / grid_size;
  std::vector<double> i1(grid_size + 1, -kInf);
  std::vector<double> i2(grid_size + 1, -kInf);
  int m = std::max(1, options.min_subpanels);
  const bool need_first = first_coef > 0.0;
  const bool need_second = second_coef > 0.0;
  if (need_first || need_second) {
    auto compute = [&](int panels) {
      std::vector<double> a(grid_size + 1, -kInf);
      std::vector<double> b(grid_size + 1, -kInf);
      if (need_first) a = cumulative_log_integral(first, h, grid_size, panels);
      if (need_second) b = cumulative_log_integral(second, h, grid_size, panels);
      return std::pair{a, b};
    };
    auto coarse = compute(m);
    for (;;) {
      if (2 * m > options.max_subpanels) {
        throw std::runtime_error("g bound: quadrature did not reach the requested agreement");
      }
      auto fine = compute(2 * m);
      m *= 2;
      const double change =
          std::max(max_log_change(coarse.first, fine.first), max_log_change(coarse.second, fine.second));
      coarse = std::move(fine);
      if (change <= options.relative_agreement) break;
    }
    i1 = std::move(coarse.first);
    i2 = std::move(coarse.second);
  }

  const double d32p = std::pow(d, 3.0 - 2.0 / p);
  const double c1 = hs.beta1 * d32p * cp2 * cb.k1;
  const double c2 = hs.beta3 * d32p * cb.k3 * cb.k3;
  const double log_prefactor =
      separation == 0.0 ? -kInf : std::log(d * d * d * cb.c_bar * cb.c_bar) + 2.0 * std::log(separation);

  MomentCurve curve;
  curve.label = "g_bound p=" + format_double(p);
  curve.quadrature_step = h / m;
  curve.grid.resize(grid_size + 1);
  curve.log_values.resize(grid_size + 1);
  for (int i = 0; i <= grid_size; ++i) {
    const double t = i == grid_size ? horizon : i * h;
    const double log_h =
        log_prefactor + log_add(log_scaled(first_coef, i1[i]), log_scaled(second_coef, 2.0 * i2[i]));
    curve.grid[i] = t;
    curve.log_values[i] =
        log_h == -kInf ? -kInf : 0.5 * (log_h + log_gronwall_factor(c1, c2, t));
  }
  curve.validate();
  return curve;
}

RateConstants theorem_constants(const CharacteristicBounds& cb, const HoelderSplit& hs) {
  cb.validate();
  hs.validate();
  const double d = cb.d;
  const double d2 = d * d;
  const double d3 = d2 * d;
  const double d4 = d2 * d2;
  RateConstants rc;
  rc.d = cb.d;
  rc.k = hs.alpha2 * d4 * cb.k1 * kBurkholderK5Squared / 2.0;
  rc.k_hat = std::sqrt(hs.alpha3) * d2 * cb.k3 + 2.0 * rc.k;
  rc.c = hs.alpha2 * d4 * cb.k1 * kBurkholderK5Squared +
         0.5 * hs.beta1 * d3 * cb.k1 * kBurkholderK5Squared + cb.sigma * cb.sigma;
  rc.c_hat = std::sqrt(hs.alpha3) * d2 * cb.k3 + std::sqrt(hs.beta3 * d3 * cb.k3 * cb.k3) +
             cb.lambda_cap;
  if (!(rc.k > 0.0) || !(rc.c > 0.0)) {
    throw std::invalid_argument("degenerate characteristics: k1 = 0 gives k = 0");
  }
  rc.validate();
  return rc;
}

}  // namespace flowgrowth::moments
