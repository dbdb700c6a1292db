#include "flowgrowth/moment_curve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace flowgrowth {

void MomentCurve::validate() const {
  if (grid.empty() || grid.size() != log_values.size()) {
    throw std::invalid_argument("moment curve: grid and values must be non-empty and equal length");
  }
  if (grid.front() != 0.0) throw std::invalid_argument("moment curve: grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("moment curve: grid must be strictly increasing");
    }
  }
  for (double v : log_values) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("moment curve: log values must not be NaN or +inf");
    }
  }
}

double MomentCurve::log_at(double t) const {
  if (t < grid.front() || t > grid.back()) {
    throw std::out_of_range("moment curve: t outside the tabulated range");
  }
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  if (*it == t) return log_values[i];
  const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
  const double a = log_values[i - 1];
  const double b = log_values[i];
  // An exact zero on one side: interpolate the value, not its log.
  if (std::isinf(a) && std::isinf(b)) return a;
  if (std::isinf(a)) return b + std::log(w);
  if (std::isinf(b)) return a + std::log1p(-w);
  return a + w * (b - a);
}

double MomentCurve::value_at(double t) const { return std::exp(log_at(t)); }

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const MomentCurve& curve) {
  os << "t,log_value,value_if_representable\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double lv = curve.log_values[i];
    os << format_double(curve.grid[i]) << ',' << format_double(lv) << ',';
    const double v = std::exp(lv);
    if (std::isfinite(v)) os << format_double(v);
    os << '\n';
  }
}

}  // namespace flowgrowth
