#include "flowgrowth/sim.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "flowgrowth/philox.hpp"

namespace flowgrowth::sim {

double Substream::normal() {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform());
}

namespace {

constexpr double kSeriesCutoff = 1e-6;

class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

// Jackknife over leave-one-out means.
MeanAndError jackknife_mean(const std::vector<double>& x) {
  const auto n = x.size();
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    return {x.front(), 0.0};
  }
  KahanSum total;
  for (double v : x) total.add(v);
  const double mean = total.value() / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  const double nm1 = static_cast<double>(n - 1);
  KahanSum loo_total;
  for (double v : x) loo_total.add((total.value() - v) / nm1);
  const double loo_mean = loo_total.value() / static_cast<double>(n);
  KahanSum sq;
  for (double v : x) {
    const double dev = (total.value() - v) / nm1 - loo_mean;
    sq.add(dev * dev);
  }
  return {mean, std::sqrt(nm1 / static_cast<double>(n) * sq.value())};
}

template <typename PathFn>
void run_paths(std::size_t n_paths, unsigned workers, PathFn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n_paths < 2) {
    for (std::size_t i = 0; i < n_paths; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n_paths + workers - 1) / workers;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n_paths, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

PathEnsemble empty_ensemble(const ibf::IbfModel& model, const SimConfig& cfg, bool log_domain) {
  PathEnsemble ens;
  ens.config = cfg;
  ens.model_ref = model.describe();
  ens.log_domain = log_domain;
  for (std::size_t s : cfg.recorded_steps()) {
    ens.times.push_back(s == cfg.steps() ? cfg.horizon : static_cast<double>(s) * cfg.dt);
  }
  ens.stream_ids.resize(cfg.n_paths);
  for (std::size_t i = 0; i < cfg.n_paths; ++i) ens.stream_ids[i] = i;
  ens.values.assign(cfg.n_paths * ens.times.size(), 0.0);
  return ens;
}

}  // namespace

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("T must be > 0");
  if (!(dt > 0.0) || dt > horizon) throw std::invalid_argument("dt must lie in (0, T]");
  if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be > 0");
  const double n = std::round(horizon / dt);
  if (std::abs(n * dt - horizon) > 1e-9 * horizon) {
    throw std::invalid_argument("T must be an integer multiple of dt");
  }
  if (static_cast<double>(n_paths) * n > budget_cap) {
    throw std::invalid_argument("n_paths * steps exceeds the configured budget cap");
  }
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

std::vector<std::size_t> SimConfig::recorded_steps() const {
  std::vector<std::size_t> out;
  const std::size_t n = steps();
  for (std::size_t s = 0; s < n; s += static_cast<std::size_t>(record_stride)) out.push_back(s);
  out.push_back(n);
  return out;
}

std::size_t PathEnsemble::time_index(double t) const {
  const double tol = 1e-9 * std::max(1.0, times.back());
  const auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) {
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the recording grid");
  }
  return static_cast<std::size_t>(it - times.begin());
}

PathEnsemble simulate_rho(const ibf::IbfModel& model, const SimConfig& cfg, unsigned workers) {
  cfg.validate();
  const double d = model.d();
  if (cfg.dt * (d - 1.0) * model.beta_n() > 0.1) {
    throw std::invalid_argument("dt too coarse for this model: dt (d-1) beta_N > 0.1");
  }
  auto ens = empty_ensemble(model, cfg, false);
  const auto recorded = cfg.recorded_steps();
  const std::size_t n_times = recorded.size();
  const std::size_t n_steps = cfg.steps();
  const double dt = cfg.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double series = (d - 1.0) * model.beta_n() / 2.0;

  run_paths(cfg.n_paths, workers, [&](std::size_t path) {
    Substream rng(cfg.seed, StreamDomain::Rho, ens.stream_ids[path]);
    double* row = ens.values.data() + path * n_times;
    double rho = cfg.r0;
    row[0] = rho;
    std::size_t next = 1;
    for (std::size_t step = 1; step <= n_steps; ++step) {
      const double z = rng.normal();  // drawn even when absorbed, to keep streams aligned
      if (rho > 0.0) {
        const double drift = rho < kSeriesCutoff ? series * rho
                                                 : (d - 1.0) * model.one_minus_b_n(rho) / rho;
        const double diffusion = std::sqrt(2.0 * std::max(0.0, model.one_minus_b_l(rho)));
        rho += drift * dt + diffusion * sqrt_dt * z;
        if (rho < 0.0) rho = 0.0;
      }
      if (next < n_times && recorded[next] == step) row[next++] = rho;
    }
  });
  return ens;
}

PathEnsemble simulate_derivative_norm(const ibf::IbfModel& model, const SimConfig& cfg,
                                      unsigned workers) {
  cfg.validate();
  auto ens = empty_ensemble(model, cfg, true);
  const std::size_t n_times = ens.times.size();
  const double offset = 0.25 * std::log(static_cast<double>(model.d()));
  const double vol = std::sqrt(model.beta_l());
  const double drift = model.lambda1();

  run_paths(cfg.n_paths, workers, [&](std::size_t path) {
    Substream rng(cfg.seed, StreamDomain::DerivativeNorm, ens.stream_ids[path]);
    double* row = ens.values.data() + path * n_times;
    double w = 0.0;
    row[0] = offset;
    for (std::size_t i = 1; i < n_times; ++i) {
      w += std::sqrt(ens.times[i] - ens.times[i - 1]) * rng.normal();
      row[i] = offset + drift * ens.times[i] + vol * w;
    }
  });
  return ens;
}

std::vector<MomentEstimate> estimate_moments(const PathEnsemble& ens,
                                             const std::vector<double>& q_list,
                                             const std::vector<double>& t_list) {
  std::vector<MomentEstimate> out;
  const std::size_t n = ens.n_paths();
  std::vector<double> x(n);
  std::vector<double> logs(n);
  for (double t : t_list) {
    const std::size_t col = ens.time_index(t);
    for (double q : q_list) {
      MomentEstimate est;
      est.q = q;
      est.t = ens.times[col];
      est.n = n;
      bool direct = !ens.log_domain;
      if (direct) {
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = std::pow(ens.at(i, col), q);
          if (!std::isfinite(x[i])) direct = false;
        }
      }
      if (direct) {
        const auto m = jackknife_mean(x);
        est.estimate = m.mean;
        est.std_error = m.std_error;
        est.log_estimate = std::log(m.mean);
        out.push_back(est);
        continue;
      }
      // Scale by the largest term so the sum stays representable.
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double v = ens.at(i, col);
        logs[i] = q == 0.0 ? 0.0 : q * (ens.log_domain ? v : std::log(v));
        top = std::max(top, logs[i]);
      }
      for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(logs[i] - top);
      const auto m = jackknife_mean(x);
      est.log_estimate = top + std::log(m.mean);
      if (est.log_estimate < std::log(std::numeric_limits<double>::max()) - 1.0) {
        est.estimate = std::exp(est.log_estimate);
        est.std_error = m.std_error * std::exp(top);
      } else {
        est.log_domain = true;
        est.estimate = est.log_estimate;
        est.std_error = m.std_error / m.mean;
      }
      out.push_back(est);
    }
  }
  return out;
}

LogNormalMoment estimate_lognormal_moment(const PathEnsemble& ens, double p, double t) {
  if (!ens.log_domain) throw std::invalid_argument("log-normal moments need a log-domain ensemble");
  const std::size_t col = ens.time_index(t);
  const std::size_t n = ens.n_paths();
  KahanSum sum;
  for (std::size_t i = 0; i < n; ++i) sum.add(ens.at(i, col));
  const double mu = sum.value() / static_cast<double>(n);
  KahanSum sq;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = ens.at(i, col) - mu;
    sq.add(dev * dev);
  }
  const double var = n > 1 ? sq.value() / static_cast<double>(n - 1) : 0.0;
  LogNormalMoment out;
  out.p = p;
  out.t = ens.times[col];
  out.n = n;
  out.log_estimate = p * mu + 0.5 * p * p * var;
  if (n > 1) {
    out.log_std_error = std::sqrt(p * p * var / static_cast<double>(n) +
                                  std::pow(p, 4) * var * var / (2.0 * static_cast<double>(n - 1)));
  }
  return out;
}

RateEstimate growth_rate(const PathEnsemble& ens, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("growth rate needs t > 0");
  const std::size_t col = ens.time_index(t);
  std::vector<double> rates;
  rates.reserve(ens.n_paths());
  RateEstimate out;
  for (std::size_t i = 0; i < ens.n_paths(); ++i) {
    const double start = ens.at(i, 0);
    const double end = ens.at(i, col);
    if (ens.log_domain) {
      rates.push_back((end - start) / ens.times[col]);
    } else if (end > 0.0) {
      rates.push_back(std::log(end / start) / ens.times[col]);
    } else {
      ++out.excluded;
    }
  }
  if (rates.empty()) throw std::runtime_error("growth rate: every path was absorbed at 0");
  const auto m = jackknife_mean(rates);
  out.mean = m.mean;
  out.std_error = m.std_error;
  out.n = rates.size();
  return out;
}

}  // namespace flowgrowth::sim
