#include "flowgrowth/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowgrowth/atomic_file.hpp"
#include "flowgrowth/ensemble_io.hpp"
#include "flowgrowth/fractal.hpp"
#include "flowgrowth/gronwall.hpp"
#include "flowgrowth/ibf.hpp"
#include "flowgrowth/moment_bounds.hpp"
#include "flowgrowth/rate.hpp"
#include "flowgrowth/report.hpp"
#include "flowgrowth/split_optimizer.hpp"
#include "flowgrowth/svg_plot.hpp"

namespace flowgrowth::cli {

namespace {

using nlohmann::json;

/// Bad input from the user: reported with exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Kind { Real, Int, Seed, Text, RealList };

struct ParamSpec {
  std::string name;
  Kind kind;
  json fallback;  // null: no default
  bool required = false;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::vector<std::string> formats;  // first entry is the default
  bool simulation = false;
};

std::vector<ParamSpec> growth_params() {
  return {{"c", Kind::Real, nullptr, true, "growth constant c > 0"},
          {"chat", Kind::Real, nullptr, true, "growth constant c-hat"},
          {"k", Kind::Real, nullptr, true, "growth constant k > 0"},
          {"khat", Kind::Real, nullptr, true, "growth constant k-hat"},
          {"d", Kind::Int, 2, false, "space dimension, >= 2"},
          {"delta", Kind::Real, nullptr, true, "box dimension, 0 <= delta <= d"}};
}

std::vector<ParamSpec> characteristic_params() {
  return {{"k1", Kind::Real, nullptr, true, "bound k1"},
          {"k2", Kind::Real, 0.0, false, "bound k2"},
          {"k3", Kind::Real, 0.0, false, "bound k3"},
          {"k4", Kind::Real, 0.0, false, "bound k4"},
          {"lambda", Kind::Real, 0.0, false, "drift bound Lambda"},
          {"sigma", Kind::Real, 0.0, false, "diffusion bound sigma"},
          {"cbar", Kind::Real, 1.0, false, "constant c-bar"},
          {"d", Kind::Int, 2, false, "space dimension, >= 2"}};
}

std::vector<ParamSpec> model_params() {
  return {{"model", Kind::Text, "potential-gaussian", false, "potential-gaussian | user-table"},
          {"ell", Kind::Real, nullptr, false, "correlation length (potential-gaussian)"},
          {"beta_L", Kind::Real, nullptr, false, "beta_L (user-table)"},
          {"beta_N", Kind::Real, nullptr, false, "beta_N (user-table)"},
          {"table", Kind::Text, nullptr, false, "CSV with columns r,B_L,B_N (user-table)"},
          {"d", Kind::Int, 2, false, "space dimension, >= 2"}};
}

std::vector<ParamSpec> sim_params() {
  return {{"horizon", Kind::Real, 1.0, false, "time horizon T"},
          {"dt", Kind::Real, 1e-3, false, "time step"},
          {"paths", Kind::Int, 1000, false, "number of paths"},
          {"seed", Kind::Seed, nullptr, true, "RNG seed (mandatory)"},
          {"r0", Kind::Real, 0.1, false, "initial two-point separation"},
          {"stride", Kind::Int, 1, false, "record every stride-th step"}};
}

template <typename... Lists>
std::vector<ParamSpec> concat(Lists... lists) {
  std::vector<ParamSpec> out;
  (out.insert(out.end(), lists.begin(), lists.end()), ...);
  return out;
}

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> table = {
      {"xi", "closed-form growth-rate bound",
       concat(growth_params(),
              std::vector<ParamSpec>{{"variant", Kind::Text, "corrected", false,
                                      "corrected | as-printed | oracle"}}),
       {"json", "csv"}},
      {"xi-oracle", "numeric growth-rate bound (gamma infimum and feasibility oracles)",
       concat(growth_params(),
              std::vector<ParamSpec>{{"tol", Kind::Real, rate::kDefaultTolerance, false, "tolerance"}}),
       {"json", "csv"}},
      {"gronwall", "Gronwall-type bound for a constant H",
       {{"c1", Kind::Real, nullptr, true, "linear coefficient C1 >= 0"},
        {"c2", Kind::Real, nullptr, true, "square-root coefficient C2 >= 0"},
        {"h", Kind::Real, 1.0, false, "constant H > 0"},
        {"horizon", Kind::Real, 1.0, false, "time horizon"},
        {"intervals", Kind::Int, 100, false, "grid intervals"}},
       {"json", "csv", "svg"}},
      {"constants", "theorem constants from characteristic bounds",
       concat(characteristic_params(),
              std::vector<ParamSpec>{{"alpha2", Kind::Real, 2.0, false, "Hoelder exponent"},
                                     {"alpha3", Kind::Real, 2.0, false, "Hoelder exponent"},
                                     {"beta1", Kind::Real, 2.0, false, "Hoelder exponent"},
                                     {"beta3", Kind::Real, 2.0, false, "Hoelder exponent"},
                                     {"delta", Kind::Real, nullptr, false, "box dimension for xi"},
                                     {"p", Kind::Real, nullptr, false, "moment order for f/g curves"},
                                     {"separation", Kind::Real, nullptr, false, "|x - y| for the g curve"},
                                     {"horizon", Kind::Real, 1.0, false, "curve horizon"},
                                     {"intervals", Kind::Int, 256, false, "curve grid intervals"}}),
       {"json", "csv", "svg"}},
      {"optimize", "Hoelder split minimizing xi",
       concat(characteristic_params(),
              std::vector<ParamSpec>{{"delta", Kind::Real, nullptr, true, "box dimension"},
                                     {"budget", Kind::Int, 400, false, "objective evaluations"}}),
       {"json"}},
      {"ibf", "isotropic Brownian flow constants and growth-rate bound",
       concat(model_params(),
              std::vector<ParamSpec>{{"delta", Kind::Real, 0.0, false, "box dimension"}}),
       {"json", "csv"}},
      {"simulate-rho", "Euler-Maruyama ensemble of the two-point distance",
       concat(model_params(), sim_params(),
              std::vector<ParamSpec>{{"q", Kind::RealList, json::array({1.0, 2.0, 4.0}), false,
                                      "moment orders"}}),
       {"json", "csv", "svg"},
       true},
      {"simulate-derivative", "exact ensemble of the derivative Schatten norm",
       concat(model_params(), sim_params(),
              std::vector<ParamSpec>{{"p", Kind::RealList, json::array({2.0}), false,
                                      "moment orders"}}),
       {"json", "csv", "svg"},
       true},
      {"verify", "bound-consistency report for an isotropic Brownian flow",
       concat(model_params(), sim_params(),
              std::vector<ParamSpec>{{"delta", Kind::Real, 0.0, false, "box dimension"},
                                     {"q", Kind::RealList, json::array({1.0, 2.0, 4.0}), false,
                                      "moment orders"}}),
       {"json"},
       true},
      {"boxdim", "box-counting dimension of a point cloud",
       {{"input", Kind::Text, nullptr, false, "CSV point cloud (one point per row, no header)"},
        {"kind", Kind::Text, nullptr, false, "cantor_dust | grid_cube | finite_points"},
        {"d", Kind::Int, 2, false, "dimension of generated sets"},
        {"rho", Kind::Real, 1.0 / 3.0, false, "cantor_dust ratio"},
        {"depth", Kind::Int, 8, false, "cantor_dust depth"},
        {"axes", Kind::RealList, json::array({1}), false, "cantor_dust active axes (1-based)"},
        {"spacing", Kind::Real, 1.0 / 256.0, false, "grid_cube spacing"},
        {"n_points", Kind::Int, 5, false, "finite_points count"},
        {"seed", Kind::Seed, 0, false, "finite_points seed"},
        {"scales", Kind::RealList, nullptr, false, "box sizes, strictly decreasing"}},
       {"json", "csv", "svg"}},
  };
  return table;
}

const CommandSpec* find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const ParamSpec& find_param(const CommandSpec& cmd, const std::string& name) {
  for (const auto& p : cmd.params) {
    if (p.name == name) return p;
  }
  throw ValidationError("unknown parameter '" + name + "' for command " + cmd.name);
}

double parse_real(const std::string& field, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ValidationError("--" + field + ": malformed number '" + std::string(text) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& field, std::string_view text) {
  Int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError("--" + field + ": malformed integer '" + std::string(text) + "'");
  }
  return v;
}

json parse_flag(const ParamSpec& spec, const std::string& text) {
  switch (spec.kind) {
    case Kind::Real: return parse_real(spec.name, text);
    case Kind::Int: return parse_int<std::int64_t>(spec.name, text);
    case Kind::Seed: return parse_int<std::uint64_t>(spec.name, text);
    case Kind::Text: return text;
    case Kind::RealList: {
      json list = json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(parse_real(spec.name, item));
      if (list.empty()) throw ValidationError("--" + spec.name + ": empty list");
      return list;
    }
  }
  return nullptr;
}

// Checks a value that came from a JSON config file against its declared type.
json check_json(const ParamSpec& spec, const json& v) {
  const auto bad = [&] { return ValidationError("config parameter '" + spec.name + "': wrong type"); };
  switch (spec.kind) {
    case Kind::Real:
      if (!v.is_number()) throw bad();
      return v.get<double>();
    case Kind::Int:
      if (!v.is_number_integer()) throw bad();
      return v.get<std::int64_t>();
    case Kind::Seed:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) throw bad();
      return v.get<std::uint64_t>();
    case Kind::Text:
      if (!v.is_string()) throw bad();
      return v;
    case Kind::RealList: {
      if (!v.is_array() || v.empty()) throw bad();
      json list = json::array();
      for (const auto& x : v) {
        if (!x.is_number()) throw bad();
        list.push_back(x.get<double>());
      }
      return list;
    }
  }
  return nullptr;
}

class Params {
 public:
  explicit Params(json values) : values_(std::move(values)) {}
  bool has(const std::string& k) const { return values_.contains(k); }
  double real(const std::string& k) const { return values_.at(k).get<double>(); }
  int integer(const std::string& k) const {
    const auto v = values_.at(k).get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw ValidationError("--" + k + ": out of range");
    }
    return static_cast<int>(v);
  }
  std::uint64_t seed(const std::string& k) const { return values_.at(k).get<std::uint64_t>(); }
  std::string text(const std::string& k) const { return values_.at(k).get<std::string>(); }
  std::vector<double> list(const std::string& k) const {
    return values_.at(k).get<std::vector<double>>();
  }
  const json& raw() const { return values_; }

 private:
  json values_;
};

struct Artifact {
  json result;
  std::optional<std::string> csv;
  std::vector<plot::Series> series;
  std::optional<sim::PathEnsemble> ensemble;  // for --binary
  int exit_code = kExitOk;
};

// Infinite values (unused Hoelder exponents) are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json xi_json(const rate::XiResult& r) {
  json j = {{"xi", r.xi}, {"case", rate::to_string(r.case_label)}, {"variant", rate::to_string(r.variant)}};
  if (r.gamma_star) j["gamma_star"] = *r.gamma_star;
  if (r.gamma_value) j["gamma_value"] = *r.gamma_value;
  return j;
}

json curve_json(const MomentCurve& c) {
  json logs = json::array();
  for (double v : c.log_values) logs.push_back(number(v));
  json j = {{"label", c.label}, {"t", c.grid}, {"log_value", logs}};
  if (c.quadrature_step) j["quadrature_step"] = *c.quadrature_step;
  return j;
}

std::string curve_csv(const MomentCurve& c) {
  std::ostringstream os;
  write_csv(os, c);
  return os.str();
}

GrowthConstants growth_from(const Params& p) {
  return GrowthConstants(p.real("c"), p.real("chat"), p.real("k"), p.real("khat"), p.integer("d"),
                         p.real("delta"));
}

moments::CharacteristicBounds bounds_from(const Params& p) {
  moments::CharacteristicBounds cb;
  cb.k1 = p.real("k1");
  cb.k2 = p.real("k2");
  cb.k3 = p.real("k3");
  cb.k4 = p.real("k4");
  cb.lambda_cap = p.real("lambda");
  cb.sigma = p.real("sigma");
  cb.c_bar = p.real("cbar");
  cb.d = p.integer("d");
  cb.validate();
  return cb;
}

json split_json(const moments::HoelderSplit& s) {
  return {{"alpha1", number(s.alpha1)}, {"alpha2", number(s.alpha2)}, {"alpha3", number(s.alpha3)},
          {"beta1", number(s.beta1)},   {"beta2", number(s.beta2)},   {"beta3", number(s.beta3)},
          {"beta4", number(s.beta4)}};
}

json rates_json(const RateConstants& rc) {
  return {{"c", rc.c}, {"chat", rc.c_hat}, {"k", rc.k}, {"khat", rc.k_hat}, {"d", rc.d}};
}

ibf::IbfModel model_from(const Params& p) {
  ibf::ModelParams mp;
  const auto id = p.text("model");
  if (id == "potential-gaussian") {
    if (!p.has("ell")) throw ValidationError("--ell is required for potential-gaussian");
    mp.values["ell"] = p.real("ell");
  } else if (id == "user-table") {
    for (const char* key : {"beta_L", "beta_N", "table"}) {
      if (!p.has(key)) throw ValidationError(std::string("--") + key + " is required for user-table");
    }
    mp.values["beta_L"] = p.real("beta_L");
    mp.values["beta_N"] = p.real("beta_N");
    std::ifstream is(p.text("table"));
    if (!is) throw ValidationError("--table: cannot open '" + p.text("table") + "'");
    mp.table = ibf::read_correlation_table(is);
  }
  return ibf::build_model(id, mp, p.integer("d"));
}

sim::SimConfig sim_config_from(const Params& p) {
  sim::SimConfig cfg;
  cfg.horizon = p.real("horizon");
  cfg.dt = p.real("dt");
  const int paths = p.integer("paths");
  if (paths < 1) throw ValidationError("--paths must be >= 1");
  cfg.n_paths = static_cast<std::size_t>(paths);
  cfg.seed = p.seed("seed");
  cfg.r0 = p.real("r0");
  cfg.record_stride = p.integer("stride");
  cfg.validate();
  return cfg;
}

Artifact cmd_xi(const Params& p) {
  const auto gc = growth_from(p);
  const auto v = p.text("variant");
  rate::Variant variant;
  if (v == "corrected") {
    variant = rate::Variant::Corrected;
  } else if (v == "as-printed") {
    variant = rate::Variant::AsPrinted;
  } else if (v == "oracle") {
    variant = rate::Variant::Oracle;
  } else {
    throw ValidationError("--variant: expected corrected, as-printed or oracle");
  }
  const auto r = rate::xi_closed_form(gc, variant);
  const auto [lo, hi] = rate::sandwich(gc);
  Artifact a;
  a.result = xi_json(r);
  a.result["sandwich"] = {{"lower", lo}, {"upper", hi}};
  a.csv = "xi,case,variant\n" + format_double(r.xi) + "," + std::string(rate::to_string(r.case_label)) +
          "," + std::string(rate::to_string(r.variant)) + "\n";
  return a;
}

Artifact cmd_xi_oracle(const Params& p) {
  const auto gc = growth_from(p);
  const double tol = p.real("tol");
  if (!(tol > 0.0)) throw ValidationError("--tol must be > 0");
  const auto r = rate::xi_oracle_ximax(gc, tol);
  const double feas = rate::xi_oracle_feasibility(gc, tol);
  Artifact a;
  a.result = {{"ximax", xi_json(r)}, {"feasibility", feas}};
  a.csv = "oracle,xi\nximax," + format_double(r.xi) + "\nfeasibility," + format_double(feas) + "\n";
  return a;
}

Artifact cmd_gronwall(const Params& p) {
  const double c1 = p.real("c1");
  const double c2 = p.real("c2");
  const double h = p.real("h");
  const double horizon = p.real("horizon");
  const int intervals = p.integer("intervals");
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw ValidationError("--c1 and --c2 must be >= 0");
  if (!(h > 0.0)) throw ValidationError("--h must be > 0");
  if (!(horizon > 0.0)) throw ValidationError("--horizon must be > 0");
  if (intervals < 1) throw ValidationError("--intervals must be >= 1");
  const double log_h = std::log(h);
  const auto curve = MomentCurve::tabulate(
      horizon, intervals,
      [&](double t) { return log_h + moments::log_gronwall_factor(c1, c2, t); }, "gronwall bound");
  Artifact a;
  a.result = {{"log_bound_at_horizon", curve.log_values.back()},
              {"bound_at_horizon", number(curve.value_at(horizon))},
              {"curve", curve_json(curve)}};
  a.csv = curve_csv(curve);
  a.series.push_back(plot::from_curve(curve));
  return a;
}

Artifact cmd_constants(const Params& p) {
  const auto cb = bounds_from(p);
  const auto hs = moments::HoelderSplit::from_free(p.real("alpha2"), p.real("alpha3"), p.real("beta1"),
                                                   p.real("beta3"));
  const auto rc = moments::theorem_constants(cb, hs);
  Artifact a;
  a.result = {{"split", split_json(hs)}, {"constants", rates_json(rc)}};
  if (p.has("delta")) a.result["xi"] = xi_json(rate::xi_closed_form(GrowthConstants(rc, p.real("delta"))));
  if (p.has("p")) {
    const double order = p.real("p");
    const double horizon = p.real("horizon");
    const int intervals = p.integer("intervals");
    const auto f = moments::f_bound_curve(cb, hs, order, horizon, intervals);
    a.result["f_bound"] = curve_json(f);
    a.csv = curve_csv(f);
    a.series.push_back(plot::from_curve(f));
    if (p.has("separation")) {
      const auto g = moments::g_bound(cb, hs, order, p.real("separation"), horizon,
                                      std::max(intervals + 1, 256));
      a.result["g_bound"] = curve_json(g);
      a.series.push_back(plot::from_curve(g));
    }
  }
  return a;
}

Artifact cmd_optimize(const Params& p) {
  const auto cb = bounds_from(p);
  const auto r = moments::optimize_split(cb, p.real("delta"), p.integer("budget"));
  Artifact a;
  a.result = {{"split", split_json(r.split)},
              {"xi", xi_json(r.xi)},
              {"default_xi", r.default_xi},
              {"evaluations", r.evaluations},
              {"converged", r.converged},
              {"kept_default", r.kept_default},
              {"flat_directions", r.flat_directions}};
  return a;
}

Artifact cmd_ibf(const Params& p) {
  const auto model = model_from(p);
  const auto rc = ibf::ibf_growth_constants(model);
  const auto xi = ibf::ibf_xi(model, p.real("delta"));
  Artifact a;
  a.result = xi_json(xi);
  a.result["model"] = model.describe();
  a.result["beta_L"] = model.beta_l();
  a.result["beta_N"] = model.beta_n();
  a.result["lambda1"] = model.lambda1();
  a.result["k1"] = model.k1();
  a.result["growth_constants"] = rates_json(rc);
  a.csv = "model,lambda1,xi,case\n\"" + model.describe() + "\"," + format_double(model.lambda1()) + "," +
          format_double(xi.xi) + "," + std::string(rate::to_string(xi.case_label)) + "\n";
  return a;
}

std::string ensemble_csv(const sim::PathEnsemble& ens) {
  std::ostringstream os;
  sim::write_ensemble_csv(os, ens);
  return os.str();
}

Artifact cmd_simulate_rho(const Params& p, unsigned workers) {
  const auto model = model_from(p);
  const auto cfg = sim_config_from(p);
  const auto q_list = p.list("q");
  for (double q : q_list) {
    if (!(q >= 1.0)) throw ValidationError("--q: moment orders must be >= 1");
  }
  auto ens = sim::simulate_rho(model, cfg, workers);
  const double horizon = ens.times.back();
  json rows = json::array();
  for (const auto& e : sim::estimate_moments(ens, q_list, {horizon})) {
    rows.push_back({{"q", e.q},
                    {"t", e.t},
                    {"estimate", e.estimate},
                    {"std_error", e.std_error},
                    {"log_domain", e.log_domain},
                    {"log_bound", ibf::rho_moment_bound(model, e.q, cfg.r0, e.t)}});
  }
  std::size_t absorbed = 0;
  for (std::size_t i = 0; i < ens.n_paths(); ++i) absorbed += ens.at(i, ens.n_times() - 1) == 0.0;
  Artifact a;
  a.result = {{"model", model.describe()}, {"moments", rows}, {"absorbed_paths", absorbed}};
  a.csv = ensemble_csv(ens);
  a.series = plot::from_ensemble(ens);
  a.ensemble = std::move(ens);
  return a;
}

Artifact cmd_simulate_derivative(const Params& p, unsigned workers) {
  const auto model = model_from(p);
  const auto cfg = sim_config_from(p);
  const auto p_list = p.list("p");
  auto ens = sim::simulate_derivative_norm(model, cfg, workers);
  const double horizon = ens.times.back();
  const auto rate = sim::growth_rate(ens, horizon);
  json rows = json::array();
  const auto direct = sim::estimate_moments(ens, p_list, {horizon});
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    const auto ln = sim::estimate_lognormal_moment(ens, p_list[i], horizon);
    rows.push_back({{"p", p_list[i]},
                    {"t", horizon},
                    {"log_estimate", ln.log_estimate},
                    {"log_std_error", ln.log_std_error},
                    {"sample_log_estimate", direct[i].log_estimate},
                    {"exact_log_moment", ibf::derivative_norm_law(model, p_list[i], horizon)}});
  }
  Artifact a;
  a.result = {{"model", model.describe()},
              {"lambda1", model.lambda1()},
              {"growth_rate", {{"mean", rate.mean}, {"std_error", rate.std_error}, {"n", rate.n}}},
              {"moments", rows}};
  a.csv = ensemble_csv(ens);
  a.series = plot::from_ensemble(ens);
  a.ensemble = std::move(ens);
  return a;
}

Artifact cmd_verify(const Params& p, unsigned workers) {
  const auto model = model_from(p);
  const auto cfg = sim_config_from(p);
  const auto report = sim::verify_report(model, p.real("delta"), cfg, p.list("q"), workers);
  Artifact a;
  a.result = sim::to_json(report);
  a.exit_code = report.passed ? kExitOk : kExitVerificationFailed;
  return a;
}

Artifact cmd_boxdim(const Params& p) {
  fractal::PointCloud pc;
  if (p.has("input") == p.has("kind")) throw ValidationError("boxdim needs exactly one of --input or --kind");
  if (p.has("input")) {
    std::ifstream is(p.text("input"));
    if (!is) throw ValidationError("--input: cannot open '" + p.text("input") + "'");
    pc = fractal::read_point_cloud(is);
  } else {
    fractal::SetParams sp;
    sp.rho = p.real("rho");
    sp.depth = p.integer("depth");
    for (double axis : p.list("axes")) {
      if (axis != std::floor(axis)) throw ValidationError("--axes: axis numbers must be integers");
      sp.active_axes.push_back(static_cast<int>(axis));
    }
    sp.spacing = p.real("spacing");
    const int n = p.integer("n_points");
    if (n < 1) throw ValidationError("--n_points must be >= 1");
    sp.n_points = static_cast<std::size_t>(n);
    sp.seed = p.seed("seed");
    pc = fractal::generate_set(fractal::parse_set_kind(p.text("kind")), sp, p.integer("d"));
  }
  const auto scales = p.has("scales") ? p.list("scales") : fractal::default_scales(pc);
  const auto bc = fractal::box_count(pc, scales);
  Artifact a;
  a.result = {{"dimension", bc.slope},
              {"r2", bc.r2},
              {"low_confidence", bc.low_confidence},
              {"window", {bc.window_begin, bc.window_end}},
              {"scales", bc.scales},
              {"counts", bc.counts},
              {"below_resolution", bc.below_resolution},
              {"points", pc.size()},
              {"d", pc.d}};
  if (pc.analytic_dim) a.result["analytic_dim"] = *pc.analytic_dim;
  std::string csv = "scale,count\n";
  plot::Series s{"box counts", {}, {}};
  for (std::size_t i = 0; i < bc.scales.size(); ++i) {
    csv += format_double(bc.scales[i]) + "," + std::to_string(bc.counts[i]) + "\n";
    s.x.push_back(-std::log(bc.scales[i]));
    s.log_y.push_back(std::log(static_cast<double>(bc.counts[i])));
  }
  a.csv = csv;
  a.series.push_back(std::move(s));
  return a;
}

Artifact dispatch(const CommandSpec& cmd, const Params& p, unsigned workers) {
  if (cmd.name == "xi") return cmd_xi(p);
  if (cmd.name == "xi-oracle") return cmd_xi_oracle(p);
  if (cmd.name == "gronwall") return cmd_gronwall(p);
  if (cmd.name == "constants") return cmd_constants(p);
  if (cmd.name == "optimize") return cmd_optimize(p);
  if (cmd.name == "ibf") return cmd_ibf(p);
  if (cmd.name == "simulate-rho") return cmd_simulate_rho(p, workers);
  if (cmd.name == "simulate-derivative") return cmd_simulate_derivative(p, workers);
  if (cmd.name == "verify") return cmd_verify(p, workers);
  return cmd_boxdim(p);
}

// Reads either a RunConfig object or a full report carrying one under "config".
json load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("--config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ValidationError("--config: " + std::string(e.what()));
  }
  if (j.is_object() && j.contains("config") && j["config"].is_object()) j = j["config"];
  if (!j.is_object()) throw ValidationError("--config: expected a JSON object");
  return j;
}

}  // namespace

std::string usage() {
  std::string s = "usage: flowgrowth <command> [options]\n\ncommands:\n";
  for (const auto& c : commands()) {
    s += "  " + c.name + std::string(std::max<std::size_t>(2, 22 - c.name.size()), ' ') + c.summary + "\n";
  }
  s += "\nRun 'flowgrowth <command> --help' for the options of one command.\n";
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return kExitUsage;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out << usage();
    return kExitOk;
  }
  const CommandSpec* cmd = find_command(args[0]);
  if (cmd == nullptr) {
    err << "unknown command '" << args[0] << "'\n" << usage();
    return kExitUsage;
  }

  CLI::App app(cmd->summary, "flowgrowth " + cmd->name);
  app.set_help_flag("--help", "print the options of this command");  // frees -h for gronwall's h
  std::map<std::string, std::string> flag_text;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const auto& spec : cmd->params) {
    std::string help = spec.help;
    if (!spec.fallback.is_null()) help += " [default " + spec.fallback.dump() + "]";
    if (spec.required) help += " (required)";
    static const std::map<Kind, std::string> type_names{{Kind::Real, "REAL"},     {Kind::Int, "INT"},
                                                        {Kind::Seed, "UINT64"},  {Kind::Text, "TEXT"},
                                                        {Kind::RealList, "LIST"}};
    flag_opts[spec.name] =
        app.add_option("--" + spec.name, flag_text[spec.name], help)->type_name(type_names.at(spec.kind));
  }
  std::string config_path;
  std::string output_path;
  std::string format;
  std::string binary_path;
  unsigned workers = 1;
  app.add_option("--config", config_path, "JSON RunConfig or report; flags override it");
  app.add_option("--output", output_path, "artifact path (written atomically); stdout if absent");
  app.add_option("--format", format, "output format");
  app.add_option("--workers", workers, "worker threads (results do not depend on it)");
  if (cmd->simulation && cmd->name != "verify") {
    app.add_option("--binary", binary_path, "also write the ensemble in FGEN1 binary layout");
  }

  app.allow_extras();
  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
    if (const auto extra = app.remaining(); !extra.empty()) {
      std::string list;
      for (const auto& a : extra) list += (list.empty() ? "" : " ") + a;
      err << "error: unexpected arguments: " << list << "\n";
      return kExitValidation;
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    json file_cfg = json::object();
    if (!config_path.empty()) file_cfg = load_config_file(config_path);
    if (file_cfg.contains("command") && file_cfg["command"] != cmd->name) {
      throw ValidationError("--config: file is for command " + file_cfg["command"].dump());
    }

    json resolved = json::object();
    for (const auto& spec : cmd->params) {
      if (!spec.fallback.is_null()) resolved[spec.name] = spec.fallback;
    }
    if (file_cfg.contains("parameters")) {
      if (!file_cfg["parameters"].is_object()) throw ValidationError("--config: parameters must be an object");
      for (const auto& [key, value] : file_cfg["parameters"].items()) {
        resolved[key] = check_json(find_param(*cmd, key), value);
      }
    }
    for (const auto& spec : cmd->params) {
      if (flag_opts[spec.name]->count() > 0) resolved[spec.name] = parse_flag(spec, flag_text[spec.name]);
    }
    for (const auto& spec : cmd->params) {
      if (spec.required && !resolved.contains(spec.name)) {
        throw ValidationError("missing required parameter --" + spec.name);
      }
    }
    if (format.empty()) {
      format = file_cfg.contains("format") && file_cfg["format"].is_string()
                   ? file_cfg["format"].get<std::string>()
                   : cmd->formats.front();
    }
    if (std::find(cmd->formats.begin(), cmd->formats.end(), format) == cmd->formats.end()) {
      throw ValidationError("--format: '" + format + "' is not available for " + cmd->name);
    }
    if (workers < 1) throw ValidationError("--workers must be >= 1");

    Artifact art = dispatch(*cmd, Params(resolved), workers);

    std::string text;
    if (format == "json") {
      const json report = {{"schema", kSchema},
                           {"config", {{"command", cmd->name}, {"parameters", resolved}, {"format", format}}},
                           {"result", art.result}};
      text = report.dump(2) + "\n";
    } else if (format == "csv") {
      if (!art.csv) throw ValidationError("--format csv: this run produced no tabular output (try --p)");
      text = *art.csv;
    } else {
      if (art.series.empty()) throw ValidationError("--format svg: this run produced no curves (try --p)");
      text = plot::render_svg(art.series);
    }
    if (output_path.empty()) {
      out << text;
    } else {
      write_file_atomic(output_path, text);
    }
    if (!binary_path.empty() && art.ensemble) {
      std::ostringstream bin;
      sim::write_ensemble_binary(bin, *art.ensemble);
      write_file_atomic(binary_path, bin.str());
    }
    if (art.exit_code == kExitVerificationFailed) err << "verification failed\n";
    return art.exit_code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace flowgrowth::cli
