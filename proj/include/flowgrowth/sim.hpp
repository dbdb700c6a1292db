#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flowgrowth/ibf.hpp"

namespace flowgrowth::sim {

struct SimConfig {
  double horizon = 1.0;        // T
  double dt = 1e-3;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
  double r0 = 0.1;             // initial separation, rho runs only
  int record_stride = 1;       // record every stride-th step (and the last)
  double budget_cap = 1e10;    // upper limit on n_paths * steps

  void validate() const;
  std::size_t steps() const;
  /// Indices (in steps) of the recorded grid, always including 0 and steps().
  std::vector<std::size_t> recorded_steps() const;
};

/// Simulated paths, row-major by path. `log_domain` ensembles store log
/// values (the derivative norm); others store the process itself.
struct PathEnsemble {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::uint64_t> stream_ids;
  std::string model_ref;
  bool log_domain = false;
  SimConfig config;

  std::size_t n_paths() const { return stream_ids.size(); }
  std::size_t n_times() const { return times.size(); }
  double at(std::size_t path, std::size_t time_index) const {
    return values[path * times.size() + time_index];
  }
  std::span<const double> path(std::size_t i) const {
    return {values.data() + i * times.size(), times.size()};
  }
  /// Index of the recorded time equal to t (within 1e-9 T); throws
  /// std::invalid_argument when t is off the grid.
  std::size_t time_index(double t) const;
};

/// Euler-Maruyama for the two-point distance
///   d rho = (d-1) (1 - B_N(rho)) / rho dt + sqrt(2 (1 - B_L(rho))) dW,
/// absorbed at 0. Throws std::invalid_argument when
/// dt (d-1) beta_N > 0.1. Paths are split over `workers` threads; results do
/// not depend on the split.
PathEnsemble simulate_rho(const ibf::IbfModel& model, const SimConfig& cfg, unsigned workers = 1);

/// Exact sampling of log ||D phi_t||_S = log(d)/4 + lambda_1 t + sqrt(beta_L) W_t
/// on the recorded grid.
PathEnsemble simulate_derivative_norm(const ibf::IbfModel& model, const SimConfig& cfg,
                                      unsigned workers = 1);

struct MomentEstimate {
  double q = 0.0;
  double t = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  /// Set when exp(log_estimate) overflows. estimate / std_error then hold
  /// the log estimate and the relative standard error.
  bool log_domain = false;
  double log_estimate = 0.0;
};

/// Sample mean of value^q (exp(q * value) for log ensembles) with jackknife
/// standard errors, Kahan-summed in path order.
std::vector<MomentEstimate> estimate_moments(const PathEnsemble& ens,
                                             const std::vector<double>& q_list,
                                             const std::vector<double>& t_list);

struct LogNormalMoment {
  double p = 0.0;
  double t = 0.0;
  double log_estimate = 0.0;  // p mu + p^2 s^2 / 2 from the sample log moments
  double log_std_error = 0.0; // delta method on (mu, s^2)
  std::size_t n = 0;
};

/// Heavy-tail aware p-th moment of a log-domain ensemble: fits the log
/// values' mean and variance and returns the log-normal moment with its
/// standard error in log space.
LogNormalMoment estimate_lognormal_moment(const PathEnsemble& ens, double p, double t);

struct RateEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t excluded = 0;  // rho paths absorbed at 0
};

/// Mean of log(X_t / X_0) / t across paths with its standard error.
RateEstimate growth_rate(const PathEnsemble& ens, double t);

}  // namespace flowgrowth::sim
