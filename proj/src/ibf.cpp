#include "flowgrowth/ibf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "flowgrowth/moment_curve.hpp"

namespace flowgrowth::ibf {

namespace {

constexpr double kTaylorSlack = 1e-12;

std::vector<double> split_row(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("correlation table line " + std::to_string(line_no) +
                                  ": not a number: '" + cell + "'");
    }
  }
  return out;
}

void check_taylor(const IbfModel& m, double r) {
  const double lim_l = 0.5 * m.beta_l() * r * r;
  const double lim_n = 0.5 * m.beta_n() * r * r;
  if (m.one_minus_b_l(r) > lim_l * (1 + kTaylorSlack) + kTaylorSlack) {
    throw ModelRejected("1 - B_L(r) exceeds beta_L r^2 / 2 at r = " + format_double(r), r);
  }
  if (m.one_minus_b_n(r) > lim_n * (1 + kTaylorSlack) + kTaylorSlack) {
    throw ModelRejected("1 - B_N(r) exceeds beta_N r^2 / 2 at r = " + format_double(r), r);
  }
}

double require(const ModelParams& p, const std::string& key) {
  const auto it = p.values.find(key);
  if (it == p.values.end()) throw std::invalid_argument("missing model parameter '" + key + "'");
  return it->second;
}

// 1 - B from a table: quadratic in r below the first nonzero node, linear
// between nodes, held constant past the end.
IbfModel::Fn table_complement(const std::vector<double>& r, std::vector<double> b) {
  std::vector<double> comp(b.size());
  std::transform(b.begin(), b.end(), comp.begin(), [](double v) { return 1.0 - v; });
  return [r, comp](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= r.back()) return comp.back();
    if (x < r[1]) return comp[1] * (x * x) / (r[1] * r[1]);
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const auto i = static_cast<std::size_t>(it - r.begin());
    const double w = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return comp[i - 1] + w * (comp[i] - comp[i - 1]);
  };
}

}  // namespace

CorrelationTable read_correlation_table(std::istream& is) {
  CorrelationTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("correlation table: empty input");
  // header line is required and must not parse as numbers
  bool header_numeric = true;
  try {
    split_row(line, 1);
  } catch (const std::invalid_argument&) {
    header_numeric = false;
  }
  if (header_numeric) throw std::invalid_argument("correlation table: header line required");
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto row = split_row(line, line_no);
    if (row.size() != 3) {
      throw std::invalid_argument("correlation table line " + std::to_string(line_no) +
                                  ": expected 3 columns (r,B_L,B_N)");
    }
    t.r.push_back(row[0]);
    t.b_l.push_back(row[1]);
    t.b_n.push_back(row[2]);
  }
  if (t.r.size() < 2) throw std::invalid_argument("correlation table: need at least two rows");
  if (t.r.front() != 0.0) throw std::invalid_argument("correlation table: r must start at 0");
  for (std::size_t i = 1; i < t.r.size(); ++i) {
    if (!(t.r[i] > t.r[i - 1])) {
      throw std::invalid_argument("correlation table: r must be strictly increasing");
    }
  }
  return t;
}

std::string IbfModel::describe() const {
  std::string out = catalog_id_ + "(";
  bool first = true;
  for (const auto& [k, v] : params_) {
    if (!first) out += ",";
    out += k + "=" + format_double(v);
    first = false;
  }
  return out + ")";
}

IbfModel build_model(std::string_view catalog_id, const ModelParams& params, int d) {
  if (d < 2) throw std::invalid_argument("IBF models need d >= 2");
  IbfModel m;
  m.d_ = d;
  m.catalog_id_ = std::string(catalog_id);
  std::vector<double> check_points;
  if (catalog_id == "potential-gaussian") {
    const double ell = require(params, "ell");
    if (!(ell > 0.0) || !std::isfinite(ell)) {
      throw std::invalid_argument("potential-gaussian: ell must be > 0");
    }
    m.params_ = {{"ell", ell}};
    const double inv2 = 1.0 / (ell * ell);
    m.beta_l_ = 3.0 * inv2;
    m.beta_n_ = inv2;
    m.one_minus_b_n_ = [inv2](double r) { return -std::expm1(-0.5 * r * r * inv2); };
    m.one_minus_b_l_ = [inv2](double r) {
      const double x = r * r * inv2;
      return -std::expm1(-0.5 * x) + x * std::exp(-0.5 * x);
    };
    for (int j = 1; j <= 500; ++j) check_points.push_back(0.01 * j);
  } else if (catalog_id == "user-table") {
    if (!params.table) throw std::invalid_argument("user-table: no correlation table given");
    const auto& t = *params.table;
    m.beta_l_ = require(params, "beta_L");
    m.beta_n_ = require(params, "beta_N");
    m.params_ = {{"beta_L", m.beta_l_}, {"beta_N", m.beta_n_}};
    if (std::abs(t.b_l.front() - 1.0) > 1e-12 || std::abs(t.b_n.front() - 1.0) > 1e-12) {
      throw ModelRejected("user-table: correlations must equal 1 at r = 0", 0.0);
    }
    for (std::size_t i = 0; i < t.r.size(); ++i) {
      if (std::abs(t.b_l[i]) > 1.0 + 1e-12 || std::abs(t.b_n[i]) > 1.0 + 1e-12) {
        throw ModelRejected("user-table: |B| exceeds 1 at r = " + format_double(t.r[i]), t.r[i]);
      }
    }
    m.one_minus_b_l_ = table_complement(t.r, t.b_l);
    m.one_minus_b_n_ = table_complement(t.r, t.b_n);
    check_points.assign(t.r.begin() + 1, t.r.end());
    for (int j = 1; j <= 500 && 0.01 * j < t.r.back(); ++j) check_points.push_back(0.01 * j);
  } else {
    throw std::invalid_argument("unknown IBF catalog id '" + std::string(catalog_id) + "'");
  }
  if (!(m.beta_l_ > 0.0) || !(m.beta_n_ > 0.0)) {
    throw std::invalid_argument("beta_L and beta_N must be positive");
  }
  m.lambda1_ = ((d - 1) * m.beta_n_ - m.beta_l_) / 2.0;
  m.k1_ = std::max(m.beta_l_, m.beta_n_);
  for (double r : check_points) check_taylor(m, r);
  return m;
}

RateConstants ibf_growth_constants(const IbfModel& model) {
  const double d = model.d();
  RateConstants rc;
  rc.d = model.d();
  rc.c = 2.0 * model.beta_l() + 10.0 * d * d * d * model.k1();
  rc.c_hat = 2.0 * model.lambda1();
  rc.k = model.beta_l() / 2.0;
  rc.k_hat = std::max(model.lambda1(), 0.0);
  rc.validate();
  return rc;
}

rate::XiResult ibf_xi(const IbfModel& model, double delta) {
  return rate::xi_closed_form(GrowthConstants(ibf_growth_constants(model), delta),
                              rate::Variant::Corrected);
}

double rho_moment_bound(const IbfModel& model, double q, double r0, double t) {
  if (!(q >= 1.0)) throw std::invalid_argument("rho moment bound needs q >= 1");
  if (!(r0 > 0.0)) throw std::invalid_argument("rho moment bound needs r0 > 0");
  return q * std::log(r0) + (q * model.lambda1() + q * q * model.beta_l() / 2.0) * t;
}

double derivative_norm_law(const IbfModel& model, double p, double t) {
  if (!(p >= 0.0)) throw std::invalid_argument("derivative norm law needs p >= 0");
  if (p == 0.0) return 0.0;
  return p / 4.0 * std::log(static_cast<double>(model.d())) +
         (p * model.lambda1() + p * p * model.beta_l() / 2.0) * t;
}

}  // namespace flowgrowth::ibf
