#include "flowgrowth/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flowgrowth/moment_curve.hpp"

namespace flowgrowth::sim {

namespace {

std::vector<double> checkpoint_times(const PathEnsemble& ens) {
  std::vector<double> out;
  const double horizon = ens.times.back();
  for (int j = 1; j <= 4; ++j) {
    const double target = horizon * j / 4.0;
    const auto it = std::min_element(ens.times.begin(), ens.times.end(), [&](double a, double b) {
      return std::abs(a - target) < std::abs(b - target);
    });
    if (*it > 0.0 && (out.empty() || *it != out.back())) out.push_back(*it);
  }
  return out;
}

std::string describe_row(const DominationRow& row) {
  std::ostringstream os;
  os << "q=" << row.q << " t=" << row.t;
  return os.str();
}

}  // namespace

VerifyReport verify_report(const ibf::IbfModel& model, double delta, const SimConfig& cfg,
                           const std::vector<double>& q_list, unsigned workers) {
  VerifyReport rep;
  rep.model = model.describe();
  rep.delta = delta;
  rep.config = cfg;
  rep.q_list = q_list;
  rep.lambda1 = model.lambda1();

  const auto xi = ibf::ibf_xi(model, delta);
  rep.xi = xi.xi;
  rep.xi_case = std::string(rate::to_string(xi.case_label));
  rep.xi_at_zero = ibf::ibf_xi(model, 0.0).xi;

  const auto norms = simulate_derivative_norm(model, cfg, workers);
  rep.empirical_rate = growth_rate(norms, norms.times.back());
  const double rate = rep.empirical_rate.mean;
  const double slack = kReportSigmas * rep.empirical_rate.std_error;

  const double lambda_plus = std::max(model.lambda1(), 0.0);
  rep.checks.push_back({"xi_zero_equals_lambda1_plus", rep.xi_at_zero == lambda_plus,
                        "xi(0) = " + format_double(rep.xi_at_zero)});
  rep.checks.push_back({"xi_monotone_in_delta", rep.xi >= rep.xi_at_zero,
                        "xi(delta) = " + format_double(rep.xi)});
  rep.checks.push_back({"empirical_rate_matches_lambda1", std::abs(rate - rep.lambda1) <= slack,
                        "rate = " + format_double(rate) + " +- " + format_double(slack)});
  bool consistent = rate - slack <= rep.xi;
  std::string detail = "one-sided: rate - 3 se <= xi";
  if (delta == 0.0 && model.lambda1() >= 0.0) {
    consistent = consistent && std::abs(rate - rep.xi) <= slack;
    detail = "two-sided: |rate - xi| <= 3 se";
  }
  rep.checks.push_back({"rate_bound_consistency", consistent, detail});

  const auto rho = simulate_rho(model, cfg, workers);
  const auto times = checkpoint_times(rho);
  const auto estimates = estimate_moments(rho, q_list, times);
  std::string offenders;
  bool dominated = true;
  for (const auto& e : estimates) {
    DominationRow row;
    row.q = e.q;
    row.t = e.t;
    row.estimate = e.estimate;
    row.std_error = e.std_error;
    row.log_bound = ibf::rho_moment_bound(model, e.q, cfg.r0, e.t);
    if (e.log_domain) {
      row.passed = e.estimate <= row.log_bound + kReportSigmas * e.std_error;
    } else {
      row.passed = e.estimate <= std::exp(row.log_bound) + kReportSigmas * e.std_error;
    }
    if (!row.passed) {
      dominated = false;
      offenders += (offenders.empty() ? "" : "; ") + describe_row(row);
    }
    rep.domination.push_back(row);
  }
  rep.checks.push_back({"rho_moment_domination", dominated,
                        dominated ? "all rows within bound + 3 se" : "failed at " + offenders});

  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const CheckResult& c) { return c.passed; });
  return rep;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json j;
  j["model"] = r.model;
  j["delta"] = r.delta;
  j["xi"] = r.xi;
  j["xi_case"] = r.xi_case;
  j["xi_at_zero"] = r.xi_at_zero;
  j["lambda1"] = r.lambda1;
  j["empirical_rate"] = {{"mean", r.empirical_rate.mean},
                         {"std_error", r.empirical_rate.std_error},
                         {"ci_low", r.empirical_rate.mean - kReportSigmas * r.empirical_rate.std_error},
                         {"ci_high", r.empirical_rate.mean + kReportSigmas * r.empirical_rate.std_error},
                         {"n", r.empirical_rate.n}};
  auto& rows = j["rho_moment_domination"] = nlohmann::json::array();
  for (const auto& row : r.domination) {
    rows.push_back({{"q", row.q},
                    {"t", row.t},
                    {"estimate", row.estimate},
                    {"std_error", row.std_error},
                    {"log_bound", row.log_bound},
                    {"passed", row.passed}});
  }
  auto& checks = j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["passed"] = r.passed;
  return j;
}

}  // namespace flowgrowth::sim
