#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "flowgrowth/ibf.hpp"
#include "flowgrowth/sim.hpp"

namespace flowgrowth::sim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct DominationRow {
  double q = 0.0;
  double t = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double log_bound = 0.0;
  bool passed = false;
};

/// Ties the growth-rate bound of an IBF to simulated single-point growth and
/// two-point moments. Comparisons are rate-level "bound consistency" checks;
/// only at delta = 0 with lambda_1 >= 0 is the bound expected to be attained.
struct VerifyReport {
  std::string model;
  double delta = 0.0;
  double xi = 0.0;
  std::string xi_case;
  double xi_at_zero = 0.0;
  double lambda1 = 0.0;
  RateEstimate empirical_rate;
  std::vector<DominationRow> domination;
  std::vector<CheckResult> checks;
  bool passed = false;
  SimConfig config;
  std::vector<double> q_list;
};

/// Standard errors allowed before a comparison counts as failed.
inline constexpr double kReportSigmas = 3.0;

VerifyReport verify_report(const ibf::IbfModel& model, double delta, const SimConfig& cfg,
                           const std::vector<double>& q_list = {1.0, 2.0, 4.0},
                           unsigned workers = 1);

nlohmann::json to_json(const VerifyReport& report);

}  // namespace flowgrowth::sim
