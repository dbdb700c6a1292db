#pragma once

#include <stdexcept>
#include <string>

#include "flowgrowth/moment_curve.hpp"

namespace flowgrowth::moments {

/// Closed-form bound for
///   f(t) <= C1 int_0^t f + C2 (int_0^t sqrt f)^2 + H(t),  H non-decreasing:
///   f(t) <= H(t) [1 + (C1 + sqrt C2)/(C1 + 2 sqrt C2) (exp{(C1 + 2 sqrt C2) t} - 1)].
/// Returns the log of the bracketed factor. C1 = C2 = 0 gives 0.
double log_gronwall_factor(double c1, double c2, double t);

/// Bound for a known value H(t).
double gronwall_bound(double c1, double c2, double h_at_t, double t);

/// Bound with H taken from a tabulated curve. H must be non-decreasing on
/// its grid and t inside it.
double gronwall_bound(double c1, double c2, const MomentCurve& h, double t);

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double blow_up_time)
      : std::runtime_error(what), blow_up_time_(blow_up_time) {}
  double blow_up_time() const { return blow_up_time_; }

 private:
  double blow_up_time_;
};

struct PicardResult {
  MomentCurve curve;
  int iterations = 0;
  bool converged = false;
};

/// Fixed point of f -> C1 int f + C2 (int sqrt f)^2 + H on a uniform grid of
/// `grid_size` nodes over [0, H.horizon()], trapezoid quadrature, starting
/// from f = H. Stops once the relative sup-change drops below 1e-10.
/// Throws DivergenceError when values pass the overflow guard.
PicardResult gronwall_picard_oracle(double c1, double c2, const MomentCurve& h, int grid_size,
                                    int iterations);

}  // namespace flowgrowth::moments
