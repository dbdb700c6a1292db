// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and sizes are fixed here and printed with
// each result.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "flowgrowth/cli.hpp"
#include "flowgrowth/fractal.hpp"
#include "flowgrowth/gronwall.hpp"
#include "flowgrowth/ibf.hpp"
#include "flowgrowth/moment_curve.hpp"
#include "flowgrowth/rate.hpp"
#include "flowgrowth/sim.hpp"
#include "oracles.hpp"

using namespace flowgrowth;
using nlohmann::json;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GrowthConstants make(const oracle::Tuple& t) {
  return GrowthConstants(t.c, t.c_hat, t.k, t.k_hat, t.d, t.delta);
}

ibf::IbfModel gaussian(double ell, int d) {
  return ibf::build_model("potential-gaussian", {{{"ell", ell}}, {}}, d);
}

// 1. closed form against both numeric oracles
constexpr int kTuples = 10000;
constexpr double kClosedVsOracleRel = 1e-6;
constexpr double kOracleVsOracleAbs = 2e-9;
constexpr double kCriterion1Seconds = 30.0;

Outcome closed_form_agreement() {
  const auto start = Clock::now();
  oracle::TupleGen gen(20260101);
  double worst_rel = 0.0;
  double worst_abs = 0.0;
  for (int i = 0; i < kTuples; ++i) {
    const auto gc = make(gen.next());
    const double closed = rate::xi_closed_form(gc, rate::Variant::Corrected).xi;
    const double ximax = rate::xi_oracle_ximax(gc).xi;
    const double feas = rate::xi_oracle_feasibility(gc);
    worst_rel = std::max(worst_rel, std::abs(closed - ximax) / std::max(1.0, std::abs(ximax)));
    worst_abs = std::max(worst_abs, std::abs(ximax - feas));
  }
  const double secs = seconds_since(start);
  return {worst_rel <= kClosedVsOracleRel && worst_abs <= kOracleVsOracleAbs && secs <= kCriterion1Seconds,
          fmt("%d tuples, max rel err %.3g (<= %.0e), max oracle gap %.3g (<= %.0e), %.2f s (<= %.0f s)",
              kTuples, worst_rel, kClosedVsOracleRel, worst_abs, kOracleVsOracleAbs, secs,
              kCriterion1Seconds)};
}

// 2. pinned values
constexpr double kPinnedTol = 1e-9;

Outcome pinned_values() {
  const double a = rate::xi_closed_form(GrowthConstants(1, 0, 1, 0, 2, 1)).xi;
  const double b = rate::xi_closed_form(GrowthConstants(1, 0, 1, 0, 2, 2)).xi;
  const double c = rate::xi_closed_form(GrowthConstants(1, 10, 1, 0, 2, 1)).xi;
  bool ok = std::abs(a - 4 * (std::sqrt(2.0) - 1)) <= kPinnedTol && std::abs(b - 2.0) <= kPinnedTol &&
            std::abs(c - 2 * std::sqrt(10.0)) <= kPinnedTol;
  oracle::TupleGen gen(11);
  int zero_cases = 0;
  double worst = 0.0;
  for (int i = 0; i < kTuples; ++i) {
    auto t = gen.next();
    t.delta = 0.0;
    const double xi = rate::xi_closed_form(make(t)).xi;
    worst = std::max(worst, std::abs(xi - t.k_hat));
    ++zero_cases;
  }
  ok = ok && worst <= kPinnedTol;
  return {ok, fmt("xi = %.15g, %.15g, %.15g; %d zero-dimension tuples, max |xi - k_hat| %.3g (tol %.0e)",
                  a, b, c, zero_cases, worst, kPinnedTol)};
}

// 3. sandwich and monotonicity in delta
constexpr int kDeltaSteps = 20;
constexpr double kFloatNoise = 1e-12;

Outcome sandwich_and_monotonicity() {
  oracle::TupleGen gen(20260101);
  long checks = 0;
  long violations = 0;
  for (int i = 0; i < kTuples; ++i) {
    const auto t = gen.next();
    const auto gc = make(t);
    double prev = -HUGE_VAL;
    for (int j = 0; j <= kDeltaSteps; ++j) {
      const auto g = gc.with_delta(t.d * static_cast<double>(j) / kDeltaSteps);
      const double xi = rate::xi_closed_form(g).xi;
      const auto [lo, hi] = rate::sandwich(g);
      const double slack = kFloatNoise * std::max(1.0, std::abs(xi));
      violations += xi < lo - slack;
      violations += xi > hi + slack;
      violations += xi < prev - slack;
      checks += 3;
      prev = xi;
    }
  }
  return {violations == 0, fmt("%ld checks over %d tuples x %d dimensions, %ld violations (float slack %.0e rel)",
                               checks, kTuples, kDeltaSteps + 1, violations, kFloatNoise)};
}

// 4. Gronwall closed form dominates the Picard fixed point
constexpr int kGronwallInstances = 100;
constexpr int kPicardGrid = 8192;
constexpr double kQuadratureSlack = 1e-6;
constexpr double kLinearTol = 1e-12;

Outcome gronwall_domination() {
  oracle::TupleGen gen(4);
  double worst_ratio = 0.0;
  double worst_linear = 0.0;
  int converged = 0;
  int linear_cases = 0;
  for (int i = 0; i < kGronwallInstances; ++i) {
    const double c1 = gen.uniform(0.0, 2.0);
    const double c2 = i % 5 == 0 ? 0.0 : gen.uniform(0.0, 2.0);
    const double horizon = gen.uniform(0.1, 3.0);
    const int steps = 1 + static_cast<int>(gen.engine()() % 5);
    std::vector<double> jump_at(steps, 0.0);
    std::vector<double> level(steps);
    double v = gen.uniform(0.1, 2.0);
    for (int s = 0; s < steps; ++s) {
      if (s > 0) jump_at[s] = gen.uniform(0.0, horizon);
      level[s] = v;
      v += gen.uniform(0.0, 1.0);
    }
    std::sort(jump_at.begin(), jump_at.end());
    const auto h = MomentCurve::tabulate(
        horizon, kPicardGrid - 1,
        [&](double t) {
          int s = 0;
          while (s + 1 < steps && jump_at[s + 1] <= t) ++s;
          return std::log(level[s]);
        },
        "H");
    const auto fixed = moments::gronwall_picard_oracle(c1, c2, h, kPicardGrid, 2000);
    converged += fixed.converged;
    for (std::size_t n = 0; n < fixed.curve.size(); ++n) {
      const double t = fixed.curve.grid[n];
      const double bound = moments::gronwall_bound(c1, c2, h, t);
      worst_ratio = std::max(worst_ratio, std::exp(fixed.curve.log_values[n]) / bound - 1.0);
      if (c2 == 0.0) {
        const double exact = h.value_at(t) * std::exp(c1 * t);
        worst_linear = std::max(worst_linear, std::abs(bound - exact) / exact);
      }
    }
    linear_cases += c2 == 0.0;
  }
  return {worst_ratio <= kQuadratureSlack && worst_linear <= kLinearTol && converged == kGronwallInstances,
          fmt("%d instances (%d converged), max picard/bound - 1 = %.3g (<= %.0e); %d C2=0 cases, "
              "max rel dev %.3g (<= %.0e)",
              kGronwallInstances, converged, worst_ratio, kQuadratureSlack, linear_cases, worst_linear,
              kLinearTol)};
}

// 5. exact-law Monte Carlo for the derivative norm
constexpr std::size_t kExactPaths = 10000;
constexpr double kRateTol = 0.017;
constexpr double kZ99 = 2.5758293035489004;
constexpr double kCriterion5Seconds = 10.0;

Outcome exact_law_monte_carlo() {
  const auto start = Clock::now();
  const auto m = gaussian(1.0, 2);
  sim::SimConfig cfg;
  cfg.horizon = 10.0;
  cfg.dt = 1.0;
  cfg.n_paths = kExactPaths;
  cfg.seed = 5;
  const auto ens = sim::simulate_derivative_norm(m, cfg);
  const auto rate = sim::growth_rate(ens, 10.0);
  const auto second = sim::estimate_lognormal_moment(ens, 2.0, 1.0);
  const double secs = seconds_since(start);
  const double law = std::log(std::sqrt(2.0) * std::exp(4.0));
  const double half_width = kZ99 * second.log_std_error;
  const bool rate_ok = std::abs(rate.mean - (-1.0)) <= kRateTol;
  const bool moment_ok = std::abs(second.log_estimate - law) <= half_width;
  return {rate_ok && moment_ok && secs <= kCriterion5Seconds,
          fmt("rate %.5f +- %.5f (target -1 +- %.3f); E||D phi_1||^2 = %.5g, 99%% CI [%.5g, %.5g] vs %.5g; "
              "%.2f s (<= %.0f s)",
              rate.mean, rate.std_error, kRateTol, std::exp(second.log_estimate),
              std::exp(second.log_estimate - half_width), std::exp(second.log_estimate + half_width),
              std::exp(law), secs, kCriterion5Seconds)};
}

// 6. two-point moment bound domination
constexpr std::size_t kRhoPaths = 10000;
constexpr double kSigmas = 3.0;
constexpr double kZ95 = 1.959963984540054;
constexpr double kCriterion6Seconds = 60.0;

Outcome rho_moment_domination() {
  const auto start = Clock::now();
  const auto m = gaussian(1.0, 2);
  sim::SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.dt = 1e-3;
  cfg.n_paths = kRhoPaths;
  cfg.seed = 6;
  cfg.r0 = 0.1;
  cfg.record_stride = 250;
  auto half = cfg;
  half.dt = cfg.dt / 2;
  half.record_stride = 2 * cfg.record_stride;
  const std::vector<double> qs{1.0, 2.0, 4.0};
  const std::vector<double> ts{0.25, 0.5, 0.75, 1.0};
  const auto coarse = sim::estimate_moments(sim::simulate_rho(m, cfg), qs, ts);
  const auto fine = sim::estimate_moments(sim::simulate_rho(m, half), qs, ts);
  const double secs = seconds_since(start);
  int dominated = 0;
  int stable = 0;
  double worst_shift = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto& e = coarse[i];
    const double bound = std::exp(ibf::rho_moment_bound(m, e.q, cfg.r0, e.t));
    dominated += e.estimate <= bound + kSigmas * e.std_error;
    const double width = 2 * kZ95 * e.std_error;
    const double shift = std::abs(fine[i].estimate - e.estimate);
    stable += shift < width;
    worst_shift = std::max(worst_shift, shift / width);
  }
  const int total = static_cast<int>(coarse.size());
  return {dominated == total && stable == total && secs <= kCriterion6Seconds,
          fmt("%d/%d estimates <= bound + %.0f SE; %d/%d step-halving shifts inside the 95%% CI width "
              "(max shift/width %.3f); %.2f s (<= %.0f s)",
              dominated, total, kSigmas, stable, total, worst_shift, secs, kCriterion6Seconds)};
}

// 7. zero-dimension specialization over catalog parameterizations
Outcome iso_specialization() {
  std::vector<ibf::IbfModel> models{gaussian(1.0, 2), gaussian(0.5, 3), gaussian(2.0, 4), gaussian(1.0, 6)};
  {
    std::istringstream table("r,B_L,B_N\n0,1,1\n0.5,0.8,0.9\n1,0.4,0.7\n2,0,0.3\n");
    ibf::ModelParams p;
    p.table = ibf::read_correlation_table(table);
    p.values = {{"beta_L", 2.0}, {"beta_N", 1.0}};
    models.push_back(ibf::build_model("user-table", p, 5));
  }
  int exact = 0;
  for (const auto& m : models) exact += ibf::ibf_xi(m, 0.0).xi == std::max(m.lambda1(), 0.0);
  const auto rc = ibf::ibf_growth_constants(models.front());
  const bool constants_ok = rc.c == 246.0 && rc.c_hat == -2.0 && rc.k == 1.5 && rc.k_hat == 0.0;
  return {exact == static_cast<int>(models.size()) && constants_ok,
          fmt("%d/%zu parameterizations with xi(0) == lambda1+; constants (%g, %g, %g, %g)", exact,
              models.size(), rc.c, rc.c_hat, rc.k, rc.k_hat)};
}

// 8. box dimension recovery
constexpr double kCantorTol = 0.07;
constexpr double kGridTol = 0.05;

Outcome box_dimension_recovery() {
  using namespace fractal;
  SetParams cp;
  cp.rho = 1.0 / 3.0;
  cp.depth = 8;
  const auto cantor = generate_set(SetKind::CantorDust, cp, 1);
  const double dc = box_count(cantor, default_scales(cantor)).slope;
  const auto grid = generate_set(SetKind::GridCube, SetParams{}, 2);
  const double dg = box_count(grid, default_scales(grid)).slope;
  SetParams fp;
  fp.n_points = 20;
  fp.seed = 8;
  const auto finite = generate_set(SetKind::FinitePoints, fp, 3);
  const double df = box_count(finite, default_scales(finite)).slope;
  return {std::abs(dc - 0.6309) <= kCantorTol && std::abs(dg - 2.0) <= kGridTol && df == 0.0,
          fmt("cantor %.6f (0.6309 +- %.2f), grid %.6f (2 +- %.2f), finite %.6f (exactly 0)", dc, kCantorTol, dg,
              kGridTol, df)};
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// 9. determinism of verify reports
Outcome verify_determinism() {
  const std::vector<std::string> base{"verify", "--ell", "1", "--d", "2", "--delta", "1", "--horizon", "1",
                                      "--dt", "1e-3", "--paths", "2000", "--seed", "9"};
  const auto first = cli_run(base);
  const auto second = cli_run(base);
  bool same = first.code == 0 && second.code == 0 && first.out == second.out;
  int workers_same = 0;
  for (const char* w : {"1", "4", "8"}) {
    auto args = base;
    args.insert(args.end(), {"--workers", w});
    const auto r = cli_run(args);
    workers_same += r.code == 0 && r.out == first.out;
  }
  return {same && workers_same == 3,
          fmt("repeat run identical: %s; identical at 1/4/8 workers: %d/3; %zu bytes", same ? "yes" : "no",
              workers_same, first.out.size())};
}

// 10. CLI examples
Outcome cli_end_to_end() {
  std::vector<std::string> failures;
  const auto xi = cli_run({"xi", "--c", "1", "--chat", "0", "--k", "1", "--khat", "0", "--d", "2", "--delta",
                           "1", "--format", "json"});
  double xi_value = NAN;
  if (xi.code == 0) {
    const auto j = json::parse(xi.out);
    xi_value = j["result"]["xi"];
    if (std::abs(xi_value - 4 * (std::sqrt(2.0) - 1)) > kPinnedTol || j["result"]["case"] != "Gamma1SubDim") {
      failures.push_back("xi value/case");
    }
  } else {
    failures.push_back("xi exit " + std::to_string(xi.code));
  }
  const auto ibf = cli_run({"ibf", "--model", "potential-gaussian", "--ell", "1", "--d", "2", "--delta", "0"});
  double ibf_value = NAN;
  if (ibf.code == 0) {
    ibf_value = json::parse(ibf.out)["result"]["xi"];
    if (ibf_value != 0.0) failures.push_back("ibf xi");
  } else {
    failures.push_back("ibf exit " + std::to_string(ibf.code));
  }
  const auto dir = std::filesystem::temp_directory_path() / ("flowgrowth_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto cloud = dir / "cloud.csv";
  std::ofstream(cloud) << "0.25,0.5\n";
  const auto box = cli_run({"boxdim", "--input", cloud.string()});
  double box_value = NAN;
  if (box.code == 0) {
    box_value = json::parse(box.out)["result"]["dimension"];
    if (box_value != 0.0) failures.push_back("boxdim dimension");
  } else {
    failures.push_back("boxdim exit " + std::to_string(box.code));
  }
  std::filesystem::remove_all(dir);
  const int unknown = cli_run({"nonsense"}).code;
  const auto malformed = cli_run({"xi", "--c", "1x", "--chat", "0", "--k", "1", "--khat", "0", "--delta", "1"});
  if (unknown != cli::kExitUsage) failures.push_back("unknown command exit");
  if (malformed.code != cli::kExitValidation || malformed.err.find("--c") == std::string::npos) {
    failures.push_back("malformed flag exit");
  }
  std::string list;
  for (const auto& f : failures) list += " " + f;
  return {failures.empty(),
          fmt("xi %.15g, ibf xi %g, boxdim %g; unknown command exit %d, malformed flag exit %d%s%s", xi_value,
              ibf_value, box_value, unknown, malformed.code, failures.empty() ? "" : "; failed:", list.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed form vs oracles", closed_form_agreement},
      {"pinned analytic values", pinned_values},
      {"sandwich and delta-monotonicity", sandwich_and_monotonicity},
      {"Gronwall domination", gronwall_domination},
      {"exact-law Monte Carlo", exact_law_monte_carlo},
      {"rho-moment bound domination", rho_moment_domination},
      {"zero-dimension specialization", iso_specialization},
      {"box dimension recovery", box_dimension_recovery},
      {"verify determinism", verify_determinism},
      {"CLI end-to-end", cli_end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("%s %2zu %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
