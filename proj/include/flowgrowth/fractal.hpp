#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace flowgrowth::fractal {

/// Points stored flat, d coordinates per point. `lo` / `hi` hold the
/// bounding box of the stored points.
struct PointCloud {
  int d = 0;
  std::vector<double> coords;
  std::vector<double> lo;
  std::vector<double> hi;
  std::optional<double> analytic_dim;
  /// Box sizes at which the generator covers exactly, when known.
  std::optional<std::vector<double>> generator_scales;

  std::size_t size() const { return d > 0 ? coords.size() / static_cast<std::size_t>(d) : 0; }
  double at(std::size_t point, int axis) const {
    return coords[point * static_cast<std::size_t>(d) + static_cast<std::size_t>(axis)];
  }
  /// Recomputes lo / hi; throws on an empty cloud or non-finite coordinates.
  void refresh_bounds();
  void translate(const std::vector<double>& shift);
};

enum class SetKind { CantorDust, GridCube, FinitePoints };

SetKind parse_set_kind(std::string_view name);

struct SetParams {
  double rho = 1.0 / 3.0;        // cantor_dust contraction ratio
  int depth = 8;                 // cantor_dust depth
  std::vector<int> active_axes;  // cantor_dust axes, 1-based; empty means axis 1 only
  double spacing = 1.0 / 256.0;  // grid_cube spacing on [0, 1)
  std::size_t n_points = 5;      // finite_points
  std::uint64_t seed = 0;        // finite_points
};

/// cantor_dust: left endpoints of the depth-truncated two-map generator with
/// ratio rho on each active axis (other axes held at 0).
/// grid_cube: the lattice spacing * {0..n-1}^d with n = round(1/spacing).
/// finite_points: n uniform points in [0,1)^d from the seeded point stream.
PointCloud generate_set(SetKind kind, const SetParams& params, int d);

struct BoxCountResult {
  std::vector<double> scales;            // strictly decreasing
  std::vector<std::size_t> counts;
  std::vector<bool> below_resolution;    // scale finer than the coordinate precision
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t window_begin = 0;          // fit uses scales[window_begin, window_end)
  std::size_t window_end = 0;
  bool low_confidence = false;
};

/// Generator scales when the cloud carries them, otherwise 2^-1 .. 2^-8
/// times the largest bounding-box side (or 1 for a single point).
std::vector<double> default_scales(const PointCloud& pc);

/// Occupied axis-aligned boxes anchored at the bounding-box minimum, for each
/// scale. Also fills the fit (slope, r2, window).
BoxCountResult box_count(const PointCloud& pc, const std::vector<double>& scales);

struct DimensionFit {
  double dimension = 0.0;
  double r2 = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  bool low_confidence = false;
};

/// Least-squares slope of log count against log(1/scale), dropping
/// floor(n/8) scales at each end. Constant counts give slope 0 with r2 = 1.
DimensionFit fit_dimension(const BoxCountResult& bc);

/// CSV, one point per row, no header; d is taken from the first row.
PointCloud read_point_cloud(std::istream& is);

}  // namespace flowgrowth::fractal
