#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wupd/error.hpp"
#include "wupd/grid.hpp"

namespace wupd {

/// Tolerance on the quadrature sum of a normalized density.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Quadrature sum of values_i * cell_measure_i.
inline double integrate(std::span<const double> values, const SupportGrid& grid) {
  if (values.size() != grid.size()) {
    throw Error(ErrorKind::LengthMismatch, "values have " + std::to_string(values.size()) +
                                               " entries, grid has " + std::to_string(grid.size()));
  }
  const auto measures = grid.cell_measures();
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += values[i] * measures[i];
  return sum;
}

/// A strictly positive density on a SupportGrid that integrates to one.
class GridDensity {
 public:
  GridDensity(SupportGrid::Ptr grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error(ErrorKind::InvalidGrid, "density needs a grid");
    if (values_.size() != grid_->size()) {
      throw Error(ErrorKind::LengthMismatch, "density values do not match the grid size");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
        throw Error(ErrorKind::NonPositiveValue,
                    "density value at index " + std::to_string(i) + " is not positive and finite");
      }
    }
    const double total = integrate(values_, *grid_);
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw Error(ErrorKind::NonFiniteIntegral,
                  "density integrates to " + std::to_string(total) + ", not 1");
    }
  }

  const SupportGrid& grid() const noexcept { return *grid_; }
  const SupportGrid::Ptr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  SupportGrid::Ptr grid_;
  std::vector<double> values_;
};

inline void require_same_grid(const GridDensity& a, const GridDensity& b) {
  if (!a.grid().same_as(b.grid())) {
    throw Error(ErrorKind::GridMismatch, "densities live on different grids");
  }
}

/// Rescales positive raw values so that they integrate to one.
inline GridDensity normalize(std::span<const double> raw, SupportGrid::Ptr grid) {
  if (!grid) throw Error(ErrorKind::InvalidGrid, "normalize needs a grid");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] > 0.0)) {
      throw Error(ErrorKind::NonPositiveValue,
                  "raw value at index " + std::to_string(i) + " is not positive");
    }
  }
  const double total = integrate(raw, *grid);
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw Error(ErrorKind::NonFiniteIntegral, "quadrature sum is not finite");
  }
  std::vector<double> values(raw.begin(), raw.end());
  for (double& v : values) {
    v /= total;
    if (!(v > 0.0)) throw Error(ErrorKind::NonFiniteIntegral, "normalized value underflowed");
  }
  return GridDensity(std::move(grid), std::move(values));
}

/// Values further than this below the peak (in log space) are held at
/// exp(kLogRelativeFloor) ~ 1e-300 instead of underflowing to zero.
inline constexpr double kLogRelativeFloor = -690.0;

/// Normalizes exp(log_raw). The maximum is subtracted first so that long
/// products accumulated in log space do not overflow.
inline GridDensity normalize_log(std::span<const double> log_raw, SupportGrid::Ptr grid) {
  if (log_raw.empty()) throw Error(ErrorKind::LengthMismatch, "no values to normalize");
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : log_raw) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw Error(ErrorKind::NonFiniteIntegral, "log density is NaN or +inf");
    }
    peak = std::max(peak, v);
  }
  if (!std::isfinite(peak)) throw Error(ErrorKind::NonFiniteIntegral, "all values are zero");
  std::vector<double> raw(log_raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = std::exp(std::max(log_raw[i] - peak, kLogRelativeFloor));
  }
  return normalize(raw, std::move(grid));
}

/// Density proportional to d^gamma. gamma == 1 returns d unchanged.
inline GridDensity power_transform(const GridDensity& d, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::NonPositiveGamma, "gamma must be positive and finite");
  }
  if (gamma == 1.0) return d;
  std::vector<double> logs(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) logs[i] = gamma * std::log(d[i]);
  return normalize_log(logs, d.grid_ptr());
}

/// Natural-log entropy -sum d log d dM.
inline double entropy(const GridDensity& d) {
  const auto measures = d.grid().cell_measures();
  double h = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) h -= d[i] * std::log(d[i]) * measures[i];
  return h;
}

inline double surprisal(const GridDensity& d, std::size_t index) {
  if (index >= d.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "index " + std::to_string(index) + " outside grid of " +
                                                std::to_string(d.size()) + " points");
  }
  return -std::log(d[index]);
}

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> mode_points;
};

/// Indices whose value is within the tie tolerance of the maximum.
inline std::vector<std::size_t> mode_indices(const GridDensity& d, double tie = kTieTolerance) {
  const double peak = *std::max_element(d.values().begin(), d.values().end());
  std::vector<std::size_t> modes;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (nearly_equal(d[i], peak, tie)) modes.push_back(i);
  }
  return modes;
}

inline MomentSummary moments(const GridDensity& d) {
  const auto points = d.grid().points();
  const auto measures = d.grid().cell_measures();
  MomentSummary out;
  for (std::size_t i = 0; i < d.size(); ++i) out.mean += points[i] * d[i] * measures[i];
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dev = points[i] - out.mean;
    out.variance += dev * dev * d[i] * measures[i];
  }
  for (std::size_t i : mode_indices(d)) out.mode_points.push_back(points[i]);
  return out;
}

inline double sup_norm_distance(const GridDensity& a, const GridDensity& b) {
  require_same_grid(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// True when every value equals the first within the tie tolerance.
inline bool is_uniform(const GridDensity& d, double tie = kTieTolerance) {
  return std::all_of(d.values().begin(), d.values().end(),
                     [&](double v) { return nearly_equal(v, d[0], tie); });
}

}  // namespace wupd
