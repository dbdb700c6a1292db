#include "flowgrowth/split_optimizer.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flowgrowth/nelder_mead.hpp"

namespace flowgrowth::moments {

namespace {

constexpr double kSeedSlack = 1e-3;

// Reciprocals (u, v) of a pair of free exponents from two logits, the third
// softmax component (logit 0) being the slack.
std::array<double, 2> reciprocals(double za, double zb) {
  const double hi = std::max({za, zb, 0.0});
  const double ea = std::exp(za - hi);
  const double eb = std::exp(zb - hi);
  const double es = std::exp(-hi);
  const double total = ea + eb + es;
  return {ea / total, eb / total};
}

HoelderSplit split_from_logits(const std::vector<double>& z) {
  const auto a = reciprocals(z[0], z[1]);
  const auto b = reciprocals(z[2], z[3]);
  return HoelderSplit::from_free(1.0 / a[0], 1.0 / a[1], 1.0 / b[0], 1.0 / b[1]);
}

double logit_for(double fraction) {
  return std::log((1.0 - kSeedSlack) * fraction / kSeedSlack);
}

double xi_of(const CharacteristicBounds& cb, const HoelderSplit& hs, double delta) {
  return rate::xi_closed_form(GrowthConstants(theorem_constants(cb, hs), delta)).xi;
}

}  // namespace

SplitOptimization optimize_split(const CharacteristicBounds& cb, double delta, int budget) {
  if (budget < 100) throw std::invalid_argument("optimize_split: budget must be >= 100");
  cb.validate();

  SplitOptimization out;
  const auto fallback = HoelderSplit::all_two();
  out.default_xi = xi_of(cb, fallback, delta);  // also rejects degenerate inputs

  int used = 0;
  const auto objective = [&](const std::vector<double>& z) {
    ++used;
    try {
      return xi_of(cb, split_from_logits(z), delta);
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const int per_axis = budget >= 400 ? 9 : 5;
  std::vector<double> seed;
  double seed_value = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= per_axis; ++i) {
    for (int j = 1; j <= per_axis; ++j) {
      const double ta = static_cast<double>(i) / (per_axis + 1);
      const double tb = static_cast<double>(j) / (per_axis + 1);
      std::vector<double> z{logit_for(ta), logit_for(1.0 - ta), logit_for(tb), logit_for(1.0 - tb)};
      const double v = objective(z);
      if (v < seed_value) {
        seed_value = v;
        seed = std::move(z);
      }
    }
  }

  const auto simplex = nelder_mead(objective, seed, 1.0, budget - used);
  out.evaluations = used;
  out.converged = simplex.converged;
  HoelderSplit best = split_from_logits(simplex.x);
  double best_xi = simplex.value;
  if (seed_value < best_xi) {
    best = split_from_logits(seed);
    best_xi = seed_value;
  }
  if (!(best_xi < out.default_xi)) {
    best = fallback;
    out.kept_default = true;
  }
  out.split = best;
  out.xi = rate::xi_closed_form(GrowthConstants(theorem_constants(cb, best), delta));

  // Probe each free exponent on its own; raising one keeps the split feasible.
  const std::array<const char*, 4> names{"alpha2", "alpha3", "beta1", "beta3"};
  const double base = out.xi.xi;
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::array<double, 4> free{best.alpha2, best.alpha3, best.beta1, best.beta3};
    free[i] *= 1.5;
    const double moved =
        xi_of(cb, HoelderSplit::from_free(free[0], free[1], free[2], free[3]), delta);
    if (std::abs(moved - base) <= 1e-12 * std::max(1.0, std::abs(base))) {
      out.flat_directions.emplace_back(names[i]);
    }
  }
  return out;
}

}  // namespace flowgrowth::moments
