#pragma once

#include <ostream>

namespace flowgrowth {

/// Moment-growth constants of a random field, before a box dimension is
/// attached. Two-point moments grow like exp{(c q^2 + c_hat q) T}, one-point
/// moments like exp{(k q^2 + k_hat q) T}.
struct RateConstants {
  double c = 1.0;
  double c_hat = 0.0;
  double k = 1.0;
  double k_hat = 0.0;
  int d = 2;

  /// Throws std::invalid_argument unless c > 0, k > 0, d >= 2 and all
  /// fields are finite.
  void validate() const;
};

/// RateConstants together with the box dimension of the set of initial
/// points. Construction validates 0 <= delta <= d.
class GrowthConstants {
 public:
  GrowthConstants(double c, double c_hat, double k, double k_hat, int d,
                  double delta);
  GrowthConstants(const RateConstants& rates, double delta);

  double c() const { return rates_.c; }
  double c_hat() const { return rates_.c_hat; }
  double k() const { return rates_.k; }
  double k_hat() const { return rates_.k_hat; }
  int d() const { return rates_.d; }
  double delta() const { return delta_; }
  const RateConstants& rates() const { return rates_; }

  GrowthConstants with_delta(double delta) const {
    return GrowthConstants(rates_, delta);
  }

 private:
  RateConstants rates_;
  double delta_;
};

std::ostream& operator<<(std::ostream& os, const GrowthConstants& gc);

}  // namespace flowgrowth
