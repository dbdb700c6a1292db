#include "flowgrowth/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "flowgrowth/atomic_file.hpp"

namespace flowgrowth::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double decade) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(decade));
  return buf;
}

}  // namespace

Series from_curve(const MomentCurve& curve) {
  return {curve.label, curve.grid, curve.log_values};
}

std::vector<Series> from_ensemble(const sim::PathEnsemble& ens, std::size_t max_paths) {
  std::vector<Series> out;
  for (std::size_t i = 0; i < std::min(max_paths, ens.n_paths()); ++i) {
    Series s;
    s.label = ens.model_ref + " path " + std::to_string(ens.stream_ids[i]);
    s.x = ens.times;
    for (double v : ens.path(i)) {
      s.log_y.push_back(ens.log_domain ? v
                                       : (v > 0.0 ? std::log(v)
                                                  : -std::numeric_limits<double>::infinity()));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string render_svg(const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("plot: no curves given");
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& s : series) {
    if (s.x.size() != s.log_y.size()) throw std::invalid_argument("plot: x and y lengths differ");
    bool any = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.log_y[i]) || !std::isfinite(s.x[i])) continue;
      any = true;
      const double y = s.log_y[i] / std::log(10.0);
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
    if (!any) throw std::invalid_argument("plot: curve '" + s.label + "' has no plottable points");
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  y_min = std::floor(y_min);
  y_max = std::ceil(y_max);
  if (y_max == y_min) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(kWidth) +
         "\" height=\"" + fixed(kHeight) + "\">\n";
  svg += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(plot_w) +
         "\" height=\"" + fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

  const double decades = y_max - y_min;
  const double step = std::max(1.0, std::ceil(decades / 10.0));
  for (double y = y_min; y <= y_max + 1e-9; y += step) {
    svg += "<line x1=\"" + fixed(kLeft - 5) + "\" y1=\"" + fixed(py(y)) + "\" x2=\"" + fixed(kLeft) +
           "\" y2=\"" + fixed(py(y)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed(kLeft - 8) + "\" y=\"" + fixed(py(y) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + tick_label(y) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double x = x_min + (x_max - x_min) * i / 4.0;
    svg += "<text x=\"" + fixed(px(x)) + "\" y=\"" + fixed(kTop + plot_h + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + escape(format_double(x)) + "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.log_y[i]) || !std::isfinite(s.x[i])) continue;
      if (!first) svg += ' ';
      svg += fixed(px(s.x[i])) + "," + fixed(py(s.log_y[i] / std::log(10.0)));
      first = false;
    }
    svg += "\"/>\n";
    const double ly = kTop + 15.0 + 18.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 15.0;
    svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 20) +
           "\" y2=\"" + fixed(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + fixed(lx + 25) + "\" y=\"" + fixed(ly + 4) + "\" font-size=\"11\">" +
           escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::vector<Series>& series, const std::filesystem::path& path) {
  write_file_atomic(path, render_svg(series));
}

}  // namespace flowgrowth::plot
