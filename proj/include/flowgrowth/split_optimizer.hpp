#pragma once

#include <string>
#include <vector>

#include "flowgrowth/moment_bounds.hpp"
#include "flowgrowth/rate.hpp"

namespace flowgrowth::moments {

struct SplitOptimization {
  HoelderSplit split;
  rate::XiResult xi;
  double default_xi = 0.0;          // xi with alpha_2 = alpha_3 = beta_1 = beta_3 = 2
  int evaluations = 0;
  bool converged = false;           // false: budget exhausted, best-seen returned
  bool kept_default = false;        // the all-two split was not beaten
  std::vector<std::string> flat_directions;  // subset of {alpha2, alpha3, beta1, beta3}
};

/// Minimizes the growth-rate bound over (alpha_2, alpha_3) and (beta_1,
/// beta_3). alpha_1, beta_2, beta_4 take up the slack. Coordinates are the
/// logits of the free reciprocals; a coarse grid seeds a downhill simplex.
/// Requires budget >= 100 objective evaluations.
SplitOptimization optimize_split(const CharacteristicBounds& cb, double delta, int budget);

}  // namespace flowgrowth::moments
