#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowgrowth/growth_constants.hpp"
#include "flowgrowth/rate.hpp"

namespace flowgrowth::ibf {

/// Tabulated longitudinal / normal correlations, r strictly increasing from 0.
struct CorrelationTable {
  std::vector<double> r;
  std::vector<double> b_l;
  std::vector<double> b_n;
};

/// CSV with a required header line and columns r,B_L,B_N.
CorrelationTable read_correlation_table(std::istream& is);

struct ModelParams {
  std::map<std::string, double> values;  // "ell" | "beta_L", "beta_N"
  std::optional<CorrelationTable> table;
};

/// Thrown when a correlation pair fails a necessary admissibility check.
class ModelRejected : public std::invalid_argument {
 public:
  ModelRejected(const std::string& what, double r) : std::invalid_argument(what), r_(r) {}
  double violating_r() const { return r_; }

 private:
  double r_;
};

/// An isotropic Brownian flow reduced to what the growth bounds need: the
/// two correlation functions, their curvatures at 0 and the derived top
/// Lyapunov exponent. Immutable after construction.
class IbfModel {
 public:
  using Fn = std::function<double(double)>;

  int d() const { return d_; }
  double beta_l() const { return beta_l_; }
  double beta_n() const { return beta_n_; }
  double lambda1() const { return lambda1_; }
  double k1() const { return k1_; }
  const std::string& catalog_id() const { return catalog_id_; }
  const std::map<std::string, double>& params() const { return params_; }

  double b_l(double r) const { return 1.0 - one_minus_b_l_(r); }
  double b_n(double r) const { return 1.0 - one_minus_b_n_(r); }
  /// 1 - B(r) without cancellation at small r.
  double one_minus_b_l(double r) const { return one_minus_b_l_(r); }
  double one_minus_b_n(double r) const { return one_minus_b_n_(r); }

  /// Catalog id plus parameters, e.g. "potential-gaussian(ell=1)".
  std::string describe() const;

 private:
  friend IbfModel build_model(std::string_view, const ModelParams&, int);
  IbfModel() = default;

  int d_ = 2;
  double beta_l_ = 0.0;
  double beta_n_ = 0.0;
  double lambda1_ = 0.0;
  double k1_ = 0.0;
  std::string catalog_id_;
  std::map<std::string, double> params_;
  Fn one_minus_b_l_;
  Fn one_minus_b_n_;
};

/// Catalog entries:
///   "potential-gaussian": gradient of a scalar field with covariance
///       ell^2 exp(-r^2 / (2 ell^2)); B_L = (1 - r^2/ell^2) e^{-r^2/(2 ell^2)},
///       B_N = e^{-r^2/(2 ell^2)}, beta_L = 3/ell^2, beta_N = 1/ell^2.
///   "user-table": tabulated correlations with declared beta_L, beta_N.
/// Rejects (ModelRejected) pairs violating 1 - B(r) <= beta r^2 / 2.
IbfModel build_model(std::string_view catalog_id, const ModelParams& params, int d);

/// c = 2 beta_L + 10 d^3 max(beta_L, beta_N), c_hat = 2 lambda_1,
/// k = beta_L / 2, k_hat = max(lambda_1, 0).
RateConstants ibf_growth_constants(const IbfModel& model);

/// Growth-rate bound for the derivative over a set of box dimension delta.
rate::XiResult ibf_xi(const IbfModel& model, double delta);

/// log of the bound |x - y|^q exp{(q lambda_1 + q^2 beta_L / 2) t} on E rho_t^q.
double rho_moment_bound(const IbfModel& model, double q, double r0, double t);

/// log E ||D phi_t||_S^p = (p/4) log d + (p lambda_1 + p^2 beta_L / 2) t, the
/// log-normal moment of d^{1/4} exp{lambda_1 t + sqrt(beta_L) W_t}.
double derivative_norm_law(const IbfModel& model, double p, double t);

}  // namespace flowgrowth::ibf
