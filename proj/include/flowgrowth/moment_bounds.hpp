#pragma once

#include <utility>

#include "flowgrowth/growth_constants.hpp"
#include "flowgrowth/moment_curve.hpp"

namespace flowgrowth::moments {

/// Flow-level bounds: k1..k4 bound the second derivatives of the martingale
/// covariance, its two-point increment, the drift gradient and its Lipschitz
/// constant. (lambda_cap, sigma, c_bar) control the two-point separation:
///   (E|phi_t(x) - phi_t(y)|^p)^{1/p} <= c_bar |x - y| exp{(Lambda + p sigma^2 / 2) t}.
struct CharacteristicBounds {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double lambda_cap = 0.0;
  double sigma = 0.0;
  double c_bar = 1.0;
  int d = 2;

  void validate() const;
};

/// Hoelder exponents (alpha_1..3) and (beta_1..4), each > 1 with reciprocals
/// summing to one. alpha_1, beta_2 and beta_4 may be +inf (reciprocal zero);
/// that is the limit in which the theorem constants are usually quoted.
struct HoelderSplit {
  double alpha1, alpha2, alpha3;
  double beta1, beta2, beta3, beta4;

  void validate() const;

  /// Fills alpha_1 from the alpha slack and splits the beta slack evenly
  /// between beta_2 and beta_4.
  static HoelderSplit from_free(double alpha2, double alpha3, double beta1, double beta3);

  /// alpha_2 = alpha_3 = beta_1 = beta_3 = 2.
  static HoelderSplit all_two() { return from_free(2.0, 2.0, 2.0, 2.0); }
};

/// Upper bound 2 sqrt(5) sqrt(p) on C_p^{1/p}. Requires p >= 2.
double burkholder_bound(double p);

/// (sigma, Lambda) = (a, b + (d - 1) a^2 / 2) from a bound `a_tilde` on the
/// martingale increment and a Lipschitz bound `b_tilde` on the drift.
std::pair<double, double> sigma_lambda_from_lipschitz(double a_tilde, double b_tilde, int d);

/// log of the bound on f_p(t), the p-th moment norm of the running sup of
/// one column of the derivative. +inf when alpha_1 is infinite.
double log_f_bound(const CharacteristicBounds& cb, const HoelderSplit& hs, double p, double t);
double f_bound(const CharacteristicBounds& cb, const HoelderSplit& hs, double p, double t);
MomentCurve f_bound_curve(const CharacteristicBounds& cb, const HoelderSplit& hs, double p,
                          double horizon, int intervals);

struct GBoundOptions {
  int min_subpanels = 1;
  int max_subpanels = 4096;
  double relative_agreement = 1e-6;
};

/// Bound on g_p(t) (the two-point derivative difference), tabulated on a
/// uniform grid of `grid_size` intervals over [0, horizon]. The forcing H is
/// integrated by composite Simpson per interval, doubling the sub-panel
/// count until two successive passes agree to `relative_agreement`; the
/// finest step is stored in `quadrature_step`.
MomentCurve g_bound(const CharacteristicBounds& cb, const HoelderSplit& hs, double p,
                    double separation, double horizon, int grid_size,
                    const GBoundOptions& options = {});

/// Constants (c, c_hat, k, k_hat) of the derivative growth theorem with
/// k_5^2 = 20. Throws std::invalid_argument when k or c vanish (k1 = 0).
RateConstants theorem_constants(const CharacteristicBounds& cb, const HoelderSplit& hs);

}  // namespace flowgrowth::moments
