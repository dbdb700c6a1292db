#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flowgrowth/moment_curve.hpp"
#include "flowgrowth/sim.hpp"

namespace flowgrowth::plot {

/// One line of a chart. The vertical coordinate is given as a natural log;
/// points with a -inf log value are left out of the polyline.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> log_y;
};

Series from_curve(const MomentCurve& curve);

/// Up to `max_paths` paths of an ensemble, one series each.
std::vector<Series> from_ensemble(const sim::PathEnsemble& ens, std::size_t max_paths = 8);

/// SVG 1.1 text with a log-scale vertical axis, one polyline per series and
/// a legend. Identical input gives identical bytes. Throws
/// std::invalid_argument for an empty list or a series without plottable points.
std::string render_svg(const std::vector<Series>& series);

/// render_svg written to `path`.
void emit_plot(const std::vector<Series>& series, const std::filesystem::path& path);

}  // namespace flowgrowth::plot
