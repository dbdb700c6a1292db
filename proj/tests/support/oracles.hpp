#pragma once

// Reference computations written independently of the library, used as test
// oracles, plus small hand-rolled generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

struct Tuple {
  double c, c_hat, k, k_hat;
  int d;
  double delta;
};

// Growth-rate bound as the crossing of the two monotone terms, found by
// bisection in log(gamma). Below the crossing the first term is smaller.
inline double xi_by_crossing(const Tuple& t) {
  const auto first = [&](double g) { return t.k_hat + 2.0 * std::sqrt(t.k * g * t.delta); };
  const auto second = [&](double g) {
    if (g * t.delta >= t.c * t.d * t.d) return 2.0 * std::sqrt(t.c * g * t.delta) + t.c_hat - g;
    return g * t.delta / t.d + t.c * t.d + t.c_hat - g;
  };
  const double at_zero = t.c * t.d + t.c_hat;
  if (t.k_hat >= at_zero) return t.k_hat;
  if (t.delta == 0.0) return t.k_hat;
  double lo = -80.0;
  double hi = 80.0;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = std::exp(mid);
    (first(g) < second(g) ? lo : hi) = mid;
  }
  const double g = std::exp(0.5 * (lo + hi));
  return std::max(first(g), second(g));
}

// Uniform draws over the property-test box used throughout: c, k in
// [0.1, 10], c_hat, k_hat in [-10, 10], d in 2..6, delta in [0, d], with a
// share of exact endpoints delta = 0 and delta = d.
class TupleGen {
 public:
  explicit TupleGen(std::uint64_t seed) : eng_(seed) {}

  Tuple next() {
    Tuple t{};
    t.c = uniform(0.1, 10.0);
    t.k = uniform(0.1, 10.0);
    t.c_hat = uniform(-10.0, 10.0);
    t.k_hat = uniform(-10.0, 10.0);
    t.d = 2 + static_cast<int>(eng_() % 5);
    const auto pick = eng_() % 20;
    t.delta = pick == 0 ? 0.0 : pick == 1 ? t.d : uniform(0.0, t.d);
    return t;
  }

  double uniform(double a, double b) {
    return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace oracle
