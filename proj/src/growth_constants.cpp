#include "flowgrowth/growth_constants.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flowgrowth {

void RateConstants::validate() const {
  if (!std::isfinite(c) || !std::isfinite(c_hat) || !std::isfinite(k) ||
      !std::isfinite(k_hat)) {
    throw std::invalid_argument("growth constants must be finite");
  }
  if (!(c > 0.0)) throw std::invalid_argument("c must be > 0, got " + std::to_string(c));
  if (!(k > 0.0)) throw std::invalid_argument("k must be > 0, got " + std::to_string(k));
  if (d < 2) throw std::invalid_argument("d must be >= 2, got " + std::to_string(d));
}

GrowthConstants::GrowthConstants(double c, double c_hat, double k, double k_hat, int d,
                                 double delta)
    : GrowthConstants(RateConstants{c, c_hat, k, k_hat, d}, delta) {}

GrowthConstants::GrowthConstants(const RateConstants& rates, double delta)
    : rates_(rates), delta_(delta) {
  rates_.validate();
  if (!std::isfinite(delta) || delta < 0.0 || delta > static_cast<double>(rates_.d)) {
    throw std::invalid_argument("box dimension must lie in [0, d], got " +
                                std::to_string(delta));
  }
}

std::ostream& operator<<(std::ostream& os, const GrowthConstants& gc) {
  return os << "(c=" << gc.c() << ", c_hat=" << gc.c_hat() << ", k=" << gc.k()
            << ", k_hat=" << gc.k_hat() << ", d=" << gc.d() << ", delta=" << gc.delta() << ")";
}

}  // namespace flowgrowth
