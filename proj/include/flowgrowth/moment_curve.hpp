#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flowgrowth {

/// A tabulated bound t -> value, stored as natural logs so that rates like
/// exp{480 t} stay representable. A log value of -inf encodes an exact zero.
struct MomentCurve {
  std::vector<double> grid;        // strictly increasing, grid.front() == 0
  std::vector<double> log_values;  // same length; never NaN or +inf
  std::string label;
  std::optional<double> quadrature_step;  // finest quadrature step, when one was used

  /// Throws std::invalid_argument when the invariants above fail.
  void validate() const;

  std::size_t size() const { return grid.size(); }
  double horizon() const { return grid.back(); }

  /// Log value at t, linear interpolation in log space between nodes.
  double log_at(double t) const;
  double value_at(double t) const;

  /// Uniform grid on [0, horizon] with `intervals` steps, filled from a
  /// log-valued function.
  template <typename LogFn>
  static MomentCurve tabulate(double horizon, int intervals, LogFn&& log_fn, std::string label) {
    MomentCurve out;
    out.label = std::move(label);
    out.grid.reserve(intervals + 1);
    out.log_values.reserve(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
      const double t = horizon * i / intervals;
      out.grid.push_back(t);
      out.log_values.push_back(log_fn(t));
    }
    return out;
  }
};

/// CSV with header `t,log_value,value_if_representable`. The third column is
/// empty when exp(log_value) overflows a double.
void write_csv(std::ostream& os, const MomentCurve& curve);

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

}  // namespace flowgrowth
