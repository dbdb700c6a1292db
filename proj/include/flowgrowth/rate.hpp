#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "flowgrowth/growth_constants.hpp"

namespace flowgrowth::rate {

enum class CaseLabel { KhatDominant, Gamma1EqualDim, Gamma1SubDim, Gamma2, NumericOnly };
enum class Variant { AsPrinted, Corrected, Oracle };

std::string_view to_string(CaseLabel label);
std::string_view to_string(Variant variant);

struct XiResult {
  double xi = 0.0;
  CaseLabel case_label = CaseLabel::NumericOnly;
  std::optional<double> gamma_star;   // minimizing gamma found by an oracle
  std::optional<double> gamma_value;  // gamma_1 / gamma_2 used by a closed form
  Variant variant = Variant::Oracle;
};

inline constexpr double kDefaultTolerance = 1e-9;

struct TailExponents {
  double b = 0.0;  // diameter-of-cell exponent
  double c = 0.0;  // cell-center exponent
};

/// Raw exponents gamma*Delta + c q^2 + (c_hat - gamma - r) q and
/// gamma*Delta + k q^2 + (k_hat - r) q. Requires q > 0.
TailExponents tail_exponents(const GrowthConstants& gc, double r, double gamma, double q);

/// Exponents after minimizing over q > d (first) and q >= 0 (second).
/// The second form only holds for r >= k_hat; smaller r is rejected.
TailExponents optimized_tail_exponents(const GrowthConstants& gc, double r, double gamma);

/// Infimum over gamma > 0 of
///   max(k_hat + 2 sqrt(k gamma Delta), h(gamma)),
/// found by a log-spaced bracket scan followed by golden-section search.
/// This is the normative definition of the growth-rate bound.
XiResult xi_oracle_ximax(const GrowthConstants& gc, double tol = kDefaultTolerance);

/// Infimum of the rates r for which some gamma makes both optimized tail
/// exponents negative, found by bisection on r.
double xi_oracle_feasibility(const GrowthConstants& gc, double tol = kDefaultTolerance);

/// Three-case closed form. `Corrected` fixes the gamma_1 (Delta = d) and
/// gamma_2 expressions so that they solve the crossing equations of the
/// gamma-infimum; `AsPrinted` keeps the original expressions for audits.
XiResult xi_closed_form(const GrowthConstants& gc, Variant variant = Variant::Corrected);

/// (k_hat, max(c d + c_hat, k_hat)).
std::pair<double, double> sandwich(const GrowthConstants& gc);

/// The quantity whose sign selects between the gamma_1 and gamma_2 cases:
/// 2 sqrt(ck) Delta d + c d^2 - 2 c Delta d + Delta (k_hat - c_hat).
double case_discriminant(const GrowthConstants& gc);

/// Value of the gamma-infimum objective at one gamma; exposed for tests
/// and plotting.
double ximax_objective(const GrowthConstants& gc, double gamma);

}  // namespace flowgrowth::rate
