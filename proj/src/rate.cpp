#include "flowgrowth/rate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flowgrowth::rate {

namespace {

constexpr double kDeltaGuard = 1e-12;
constexpr int kScanPoints = 64;
constexpr double kScanDecades = 30.0;
constexpr double kInvPhi = 0.6180339887498949;

double sqr(double x) { return x * x; }

// Root in r of the q-optimized diameter exponent: the cell diameters stay
// below e^{rT} with overwhelming probability once r exceeds this value.
double diameter_threshold(const GrowthConstants& gc, double gamma) {
  const double c = gc.c();
  const double d = gc.d();
  const double gd = gamma * gc.delta();
  if (gd >= c * d * d) return 2.0 * std::sqrt(c * gd) + gc.c_hat() - gamma;
  return c * d + gc.c_hat() - gamma * (1.0 - gc.delta() / d);
}

double gamma_upper(const GrowthConstants& gc) {
  const double c = gc.c();
  const double d = gc.d();
  const double delta = gc.delta();
  const double upper = sandwich(gc).second;
  return std::max({c * d * d / std::max(delta, kDeltaGuard), c * delta,
                   (upper - gc.c_hat()) * 4.0, std::abs(gc.c_hat() - gc.k_hat()), 1.0}) *
         10.0;
}

}  // namespace

std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::KhatDominant: return "KhatDominant";
    case CaseLabel::Gamma1EqualDim: return "Gamma1EqualDim";
    case CaseLabel::Gamma1SubDim: return "Gamma1SubDim";
    case CaseLabel::Gamma2: return "Gamma2";
    case CaseLabel::NumericOnly: return "NumericOnly";
  }
  return "?";
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::AsPrinted: return "AsPrinted";
    case Variant::Corrected: return "Corrected";
    case Variant::Oracle: return "Oracle";
  }
  return "?";
}

std::pair<double, double> sandwich(const GrowthConstants& gc) {
  const double lower = gc.k_hat();
  return {lower, std::max(gc.c() * gc.d() + gc.c_hat(), lower)};
}

double case_discriminant(const GrowthConstants& gc) {
  const double c = gc.c();
  const double k = gc.k();
  const double d = gc.d();
  const double delta = gc.delta();
  return 2.0 * std::sqrt(c * k) * delta * d + c * d * d - 2.0 * c * delta * d +
         delta * (gc.k_hat() - gc.c_hat());
}

TailExponents tail_exponents(const GrowthConstants& gc, double r, double gamma, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("tail_exponents: q must be > 0");
  const double cover = gamma * gc.delta();
  return {cover + gc.c() * q * q + (gc.c_hat() - gamma - r) * q,
          cover + gc.k() * q * q + (gc.k_hat() - r) * q};
}

TailExponents optimized_tail_exponents(const GrowthConstants& gc, double r, double gamma) {
  if (r < gc.k_hat()) {
    throw std::invalid_argument("optimized tail exponents require r >= k_hat");
  }
  const double c = gc.c();
  const double d = gc.d();
  const double cover = gamma * gc.delta();
  TailExponents out;
  if (r >= 2.0 * c * d + gc.c_hat() - gamma) {
    out.b = cover - sqr(r - gc.c_hat() + gamma) / (4.0 * c);
  } else {
    out.b = cover + (c * d + gc.c_hat() - gamma - r) * d;
  }
  out.c = cover - sqr(r - gc.k_hat()) / (4.0 * gc.k());
  return out;
}

double ximax_objective(const GrowthConstants& gc, double gamma) {
  const double center = gc.k_hat() + 2.0 * std::sqrt(gc.k() * gamma * gc.delta());
  return std::max(center, diameter_threshold(gc, gamma));
}

XiResult xi_oracle_ximax(const GrowthConstants& gc, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  XiResult out;
  out.variant = Variant::Oracle;
  out.case_label = CaseLabel::NumericOnly;
  if (gc.delta() == 0.0) {
    out.xi = gc.k_hat();
    return out;
  }

  // The objective is non-increasing up to the crossing of its two terms and
  // strictly increasing afterwards, so the grid minimum brackets the infimum.
  const auto f = [&](double log_gamma) { return ximax_objective(gc, std::exp(log_gamma)); };
  double log_hi = std::log(gamma_upper(gc));
  std::array<double, kScanPoints> grid{};
  std::array<double, kScanPoints> vals{};
  std::size_t best = 0;
  for (int expand = 0;; ++expand) {
    const double log_lo = log_hi - kScanDecades * std::log(10.0);
    for (int i = 0; i < kScanPoints; ++i) {
      grid[i] = log_lo + (log_hi - log_lo) * i / (kScanPoints - 1);
      vals[i] = f(grid[i]);
    }
    // Last point within rounding of the minimum, so a flat stretch before
    // the dip cannot hide it.
    const double lowest = *std::min_element(vals.begin(), vals.end());
    const double slack = 1e-12 * std::max(1.0, std::abs(lowest));
    best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (vals[i] <= lowest + slack) best = i;
    }
    if (best + 1 < grid.size() || expand > 40) break;
    log_hi += std::log(1e3);
  }

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min<std::size_t>(best + 1, grid.size() - 1)];
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 400 && (b - a) > 1e-15; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  double best_log = vals[best] < std::min(f1, f2) ? grid[best] : (f1 < f2 ? x1 : x2);
  double best_val = std::min({vals[best], f1, f2});

  // gamma -> 0+ limit of the objective.
  const double boundary = sandwich(gc).second;
  if (boundary < best_val) {
    out.xi = boundary;
    return out;
  }
  out.xi = best_val;
  out.gamma_star = std::exp(best_log);
  return out;
}

namespace {

// min over gamma of max(B_opt, C_opt) < 0. B_opt is non-increasing and
// C_opt strictly increasing in gamma, so the minimum sits at their crossing.
bool rate_feasible(const GrowthConstants& gc, double r) {
  if (r <= gc.k_hat()) return false;
  const auto gap = [&](double gamma) {
    const auto e = optimized_tail_exponents(gc, r, gamma);
    return e.b - e.c;
  };
  const auto at = [&](double gamma) {
    const auto e = optimized_tail_exponents(gc, r, gamma);
    return std::max(e.b, e.c);
  };
  if (gap(0.0) <= 0.0) return at(0.0) < 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (gap(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return false;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::min(at(lo), at(hi)) < 0.0;
}

}  // namespace

double xi_oracle_feasibility(const GrowthConstants& gc, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (gc.delta() == 0.0) return gc.k_hat();
  double lo = gc.k_hat();
  double hi = sandwich(gc).second + 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (rate_feasible(gc, mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

XiResult xi_closed_form(const GrowthConstants& gc, Variant variant) {
  if (variant == Variant::Oracle) return xi_oracle_ximax(gc);
  const bool printed = variant == Variant::AsPrinted;
  const double c = gc.c();
  const double k = gc.k();
  const double d = gc.d();
  const double delta = gc.delta();
  const double gap = c * d + gc.c_hat() - gc.k_hat();

  XiResult out;
  out.variant = variant;
  if (gap <= 0.0) {
    out.case_label = CaseLabel::KhatDominant;
    out.xi = gc.k_hat();
    return out;
  }

  double gamma = 0.0;
  if (case_discriminant(gc) >= 0.0) {
    if (delta == d) {
      out.case_label = CaseLabel::Gamma1EqualDim;
      const double root = gap / (2.0 * std::sqrt(k * d));
      gamma = printed ? root : root * root;
    } else {
      out.case_label = CaseLabel::Gamma1SubDim;
      const double slack = 1.0 - delta / d;
      const double kd = k * delta;
      // Positive root of slack*s^2 + 2 sqrt(k Delta) s - gap = 0.
      const double s = printed ? (-std::sqrt(kd) + std::sqrt(kd + slack * gap)) / slack
                               : gap / (std::sqrt(kd) + std::sqrt(kd + slack * gap));
      gamma = s * s;
    }
  } else {
    out.case_label = CaseLabel::Gamma2;
    const double disc = sqr(std::sqrt(c) - std::sqrt(k)) * delta + gc.c_hat() - gc.k_hat();
    if (disc < 0.0) {
      throw std::logic_error("gamma_2 case with negative discriminant; inconsistent case split");
    }
    if (printed) {
      gamma = sqr(std::sqrt(c * delta) + std::sqrt(k * delta) + std::sqrt(disc));
    } else {
      // Positive root of s^2 + 2 (sqrt(k Delta) - sqrt(c Delta)) s - (c_hat - k_hat) = 0.
      const double shift = std::sqrt(c * delta) - std::sqrt(k * delta);
      const double e = gc.c_hat() - gc.k_hat();
      const double s = shift >= 0.0 ? shift + std::sqrt(disc) : e / (std::sqrt(disc) - shift);
      gamma = s * s;
    }
  }
  out.gamma_value = gamma;
  out.xi = gc.k_hat() + 2.0 * std::sqrt(k * delta * gamma);
  return out;
}

}  // namespace flowgrowth::rate
