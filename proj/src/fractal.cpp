#include "flowgrowth/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "flowgrowth/philox.hpp"

namespace flowgrowth::fractal {

namespace {

// Points that sit on a box edge up to rounding belong to the upper box.
constexpr double kEdgeSnap = 1e-9;
constexpr double kLowConfidenceR2 = 0.9;

}  // namespace

void PointCloud::refresh_bounds() {
  if (d < 1) throw std::invalid_argument("point cloud dimension must be >= 1");
  if (coords.empty() || coords.size() % static_cast<std::size_t>(d) != 0) {
    throw std::invalid_argument("point cloud must hold a positive number of d-dimensional points");
  }
  lo.assign(d, std::numeric_limits<double>::infinity());
  hi.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < size(); ++i) {
    for (int a = 0; a < d; ++a) {
      const double x = at(i, a);
      if (!std::isfinite(x)) throw std::invalid_argument("point cloud has a non-finite coordinate");
      lo[a] = std::min(lo[a], x);
      hi[a] = std::max(hi[a], x);
    }
  }
}

void PointCloud::translate(const std::vector<double>& shift) {
  if (shift.size() != static_cast<std::size_t>(d)) throw std::invalid_argument("shift has wrong length");
  for (std::size_t i = 0; i < size(); ++i) {
    for (int a = 0; a < d; ++a) coords[i * d + a] += shift[a];
  }
  refresh_bounds();
}

SetKind parse_set_kind(std::string_view name) {
  if (name == "cantor_dust") return SetKind::CantorDust;
  if (name == "grid_cube") return SetKind::GridCube;
  if (name == "finite_points") return SetKind::FinitePoints;
  throw std::invalid_argument("unknown set kind '" + std::string(name) + "'");
}

PointCloud generate_set(SetKind kind, const SetParams& params, int d) {
  if (d < 1) throw std::invalid_argument("generate_set: d must be >= 1");
  PointCloud pc;
  pc.d = d;
  switch (kind) {
    case SetKind::CantorDust: {
      const double rho = params.rho;
      if (!(rho > 0.0)) throw std::invalid_argument("cantor_dust: rho must be > 0");
      if (rho >= 0.5) throw std::invalid_argument("cantor_dust: rho >= 1/2 gives overlapping cells");
      if (params.depth < 1) throw std::invalid_argument("cantor_dust: depth must be >= 1");
      std::vector<int> axes = params.active_axes.empty() ? std::vector<int>{1} : params.active_axes;
      std::sort(axes.begin(), axes.end());
      if (std::adjacent_find(axes.begin(), axes.end()) != axes.end() || axes.front() < 1 ||
          axes.back() > d) {
        throw std::invalid_argument("cantor_dust: active_axes must be distinct values in 1..d");
      }
      const int bits = params.depth * static_cast<int>(axes.size());
      if (bits > 24) throw std::invalid_argument("cantor_dust: depth * |active_axes| must be <= 24");

      std::vector<double> line(std::size_t{1} << params.depth);
      for (std::size_t code = 0; code < line.size(); ++code) {
        double x = 0.0;
        double weight = 1.0 - rho;
        for (int i = params.depth - 1; i >= 0; --i) {
          if ((code >> i) & 1u) x += weight;
          weight *= rho;
        }
        line[code] = x;
      }
      const std::size_t n = std::size_t{1} << bits;
      pc.coords.assign(n * d, 0.0);
      for (std::size_t p = 0; p < n; ++p) {
        std::size_t rest = p;
        for (int a : axes) {
          pc.coords[p * d + (a - 1)] = line[rest % line.size()];
          rest /= line.size();
        }
      }
      pc.analytic_dim = static_cast<double>(axes.size()) * std::log(2.0) / std::log(1.0 / rho);
      std::vector<double> scales;
      for (int j = 1; j <= params.depth; ++j) scales.push_back(std::pow(rho, j));
      pc.generator_scales = scales;
      break;
    }
    case SetKind::GridCube: {
      const double h = params.spacing;
      if (!(h > 0.0) || h > 1.0) throw std::invalid_argument("grid_cube: spacing must lie in (0, 1]");
      const auto n = static_cast<std::size_t>(std::llround(1.0 / h));
      const double total = std::pow(static_cast<double>(n), d);
      if (total > 1e7) throw std::invalid_argument("grid_cube: more than 1e7 points requested");
      const auto count = static_cast<std::size_t>(total);
      pc.coords.resize(count * d);
      for (std::size_t p = 0; p < count; ++p) {
        std::size_t rest = p;
        for (int a = 0; a < d; ++a) {
          pc.coords[p * d + a] = static_cast<double>(rest % n) * h;
          rest /= n;
        }
      }
      pc.analytic_dim = d;
      std::vector<double> scales;
      for (double s = 0.5; s >= h * (1.0 - 1e-12); s *= 0.5) scales.push_back(s);
      if (scales.size() >= 4) pc.generator_scales = scales;
      break;
    }
    case SetKind::FinitePoints: {
      if (params.n_points < 1) throw std::invalid_argument("finite_points: need at least one point");
      sim::Substream rng(params.seed, sim::StreamDomain::PointSet, 0);
      pc.coords.resize(params.n_points * d);
      for (double& x : pc.coords) x = rng.uniform();
      pc.analytic_dim = 0.0;
      // Below the smallest coordinate gap every point has its own box.
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < params.n_points; ++i) {
        for (std::size_t j = i + 1; j < params.n_points; ++j) {
          double cheb = 0.0;
          for (int a = 0; a < d; ++a) cheb = std::max(cheb, std::abs(pc.coords[i * d + a] - pc.coords[j * d + a]));
          gap = std::min(gap, cheb);
        }
      }
      if (std::isfinite(gap) && gap > 0.0) {
        std::vector<double> scales;
        for (int j = 1; j <= 8; ++j) scales.push_back(gap * std::ldexp(1.0, -j));
        pc.generator_scales = scales;
      }
      break;
    }
  }
  pc.refresh_bounds();
  return pc;
}

std::vector<double> default_scales(const PointCloud& pc) {
  if (pc.generator_scales) return *pc.generator_scales;
  double side = 0.0;
  for (int a = 0; a < pc.d; ++a) side = std::max(side, pc.hi[a] - pc.lo[a]);
  if (side == 0.0) side = 1.0;
  std::vector<double> scales;
  for (int j = 1; j <= 8; ++j) scales.push_back(side * std::ldexp(1.0, -j));
  return scales;
}

BoxCountResult box_count(const PointCloud& pc, const std::vector<double>& scales) {
  if (pc.size() == 0) throw std::invalid_argument("box_count: empty point cloud");
  if (scales.size() < 4) throw std::invalid_argument("box_count: need at least 4 scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) {
      throw std::invalid_argument("box_count: scales must be positive and finite");
    }
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw std::invalid_argument("box_count: scales must be strictly decreasing");
    }
  }
  double magnitude = 0.0;
  for (int a = 0; a < pc.d; ++a) {
    magnitude = std::max({magnitude, std::abs(pc.lo[a]), std::abs(pc.hi[a])});
  }
  const double resolution = 16.0 * std::numeric_limits<double>::epsilon() * std::max(magnitude, 1e-300);

  BoxCountResult out;
  out.scales = scales;
  std::vector<std::int64_t> keys(pc.size() * pc.d);
  std::vector<std::size_t> order(pc.size());
  for (double s : scales) {
    for (std::size_t i = 0; i < pc.size(); ++i) {
      for (int a = 0; a < pc.d; ++a) {
        keys[i * pc.d + a] =
            static_cast<std::int64_t>(std::floor((pc.at(i, a) - pc.lo[a]) / s + kEdgeSnap));
      }
    }
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto key_less = [&](std::size_t x, std::size_t y) {
      return std::lexicographical_compare(keys.begin() + x * pc.d, keys.begin() + (x + 1) * pc.d,
                                          keys.begin() + y * pc.d, keys.begin() + (y + 1) * pc.d);
    };
    std::sort(order.begin(), order.end(), key_less);
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (key_less(order[i - 1], order[i])) ++distinct;
    }
    out.counts.push_back(distinct);
    out.below_resolution.push_back(s < resolution);
  }
  const auto fit = fit_dimension(out);
  out.slope = fit.dimension;
  out.r2 = fit.r2;
  out.window_begin = fit.window_begin;
  out.window_end = fit.window_end;
  out.low_confidence = fit.low_confidence;
  return out;
}

DimensionFit fit_dimension(const BoxCountResult& bc) {
  const std::size_t n = bc.scales.size();
  if (bc.counts.size() != n) throw std::invalid_argument("fit_dimension: scales and counts differ in length");
  const std::size_t drop = n / 8;
  DimensionFit fit;
  fit.window_begin = drop;
  fit.window_end = n - drop;
  const std::size_t m = fit.window_end - fit.window_begin;
  if (m < 4) throw std::invalid_argument("fit_dimension: need at least 4 usable scales");

  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = fit.window_begin; i < fit.window_end; ++i) {
    if (bc.counts[i] < 1) throw std::invalid_argument("fit_dimension: zero count");
    x.push_back(-std::log(bc.scales[i]));
    y.push_back(std::log(static_cast<double>(bc.counts[i])));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.dimension = sxy / sxx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.low_confidence = fit.r2 < kLowConfidenceR2;
  return fit;
}

PointCloud read_point_cloud(std::istream& is) {
  PointCloud pc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::logic_error&) {
        used = 0;
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used == 0 || used != cell.size()) {
        throw std::invalid_argument("point cloud line " + std::to_string(line_no) +
                                    ": not a number: '" + cell + "'");
      }
      row.push_back(v);
    }
    if (pc.d == 0) pc.d = static_cast<int>(row.size());
    if (row.size() != static_cast<std::size_t>(pc.d)) {
      throw std::invalid_argument("point cloud line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(pc.d) + " columns");
    }
    pc.coords.insert(pc.coords.end(), row.begin(), row.end());
  }
  if (pc.coords.empty()) throw std::invalid_argument("point cloud: no points");
  pc.refresh_bounds();
  return pc;
}

}  // namespace flowgrowth::fractal
