#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wupd/error.hpp"

namespace wupd {

/// Relative tolerance used for "equal density" decisions (modes, ties in the
/// dispersion conditions).
inline constexpr double kTieTolerance = 1e-12;

inline bool nearly_equal(double a, double b, double rel_tol = kTieTolerance) noexcept {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

namespace detail {

// Neumaier compensated sum.
template <typename Range>
double compensated_sum(const Range& terms) {
  double sum = 0.0;
  double carry = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    if (std::abs(sum) >= std::abs(t)) {
      carry += (sum - next) + t;
    } else {
      carry += (t - next) + sum;
    }
    sum = next;
  }
  return sum + carry;
}

}  // namespace detail

enum class MeasureKind { Continuous, Counting };

/// A discretized support with one quadrature weight per point.
///
/// Continuous grids partition [lower, upper] into cells, so the weights add up
/// to the interval length. Counting grids give every point unit weight.
/// Grids are immutable and shared between densities through `Ptr`.
class SupportGrid {
 public:
  using Ptr = std::shared_ptr<const SupportGrid>;

  /// Uniformly spaced points including both bounds; interior weight h, end
  /// weights h/2 (trapezoid weights).
  static Ptr uniform(double lower, double upper, std::size_t n) {
    check_bounds(lower, upper, n);
    const double h = (upper - lower) / static_cast<double>(n - 1);
    std::vector<double> points(n);
    std::vector<double> measures(n, h);
    for (std::size_t i = 0; i + 1 < n; ++i) points[i] = lower + static_cast<double>(i) * h;
    points[n - 1] = upper;
    measures.front() = measures.back() = 0.5 * h;
    return make(std::move(points), std::move(measures), lower, upper, MeasureKind::Continuous);
  }

  /// Cells with boundaries lower + (upper - lower) sin^2(k pi / 2n), one point
  /// at the mapped centre of each cell. Cells shrink quadratically towards both
  /// ends and no point sits on a bound, which keeps densities with integrable
  /// endpoint singularities (Beta with a or b < 1) accurate.
  static Ptr sine_mapped(double lower, double upper, std::size_t n) {
    check_bounds(lower, upper, n);
    const double range = upper - lower;
    const double step = std::numbers::pi / (2.0 * static_cast<double>(n));
    std::vector<double> points(n);
    std::vector<double> measures(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double phi = (static_cast<double>(k) + 0.5) * step;
      if (phi <= std::numbers::pi / 4.0) {
        const double s = std::sin(phi);
        points[k] = lower + range * s * s;
      } else {
        const double c = std::cos(phi);
        points[k] = upper - range * c * c;
      }
      // sin^2(x) - sin^2(y) = sin(x + y) sin(x - y)
      measures[k] = range * std::sin((2.0 * static_cast<double>(k) + 1.0) * step) * std::sin(step);
    }
    return make(std::move(points), std::move(measures), lower, upper, MeasureKind::Continuous);
  }

  /// Geometrically spaced cells on [lower, upper] (lower > 0); points at the
  /// geometric centre of each cell. Used for heavy right tails.
  static Ptr geometric(double lower, double upper, std::size_t n) {
    check_bounds(lower, upper, n);
    if (!(lower > 0.0)) throw Error(ErrorKind::InvalidGrid, "geometric grid needs lower > 0");
    const double log_ratio = std::log(upper / lower);
    std::vector<double> bounds(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      bounds[k] = lower * std::exp(log_ratio * static_cast<double>(k) / static_cast<double>(n));
    }
    bounds.front() = lower;
    bounds.back() = upper;
    std::vector<double> points(n);
    std::vector<double> measures(n);
    for (std::size_t k = 0; k < n; ++k) {
      points[k] = std::sqrt(bounds[k] * bounds[k + 1]);
      measures[k] = bounds[k + 1] - bounds[k];
    }
    return make(std::move(points), std::move(measures), lower, upper, MeasureKind::Continuous);
  }

  /// Counting measure over the given points.
  static Ptr counting(std::vector<double> points) {
    if (points.size() < 2) throw Error(ErrorKind::InvalidGrid, "a grid needs at least 2 points");
    const double lower = points.front();
    const double upper = points.back();
    std::vector<double> measures(points.size(), 1.0);
    return make(std::move(points), std::move(measures), lower, upper, MeasureKind::Counting);
  }

  /// Counting measure over 0, 1, ..., n-1.
  static Ptr counting(std::size_t n) {
    std::vector<double> points(n);
    for (std::size_t i = 0; i < n; ++i) points[i] = static_cast<double>(i);
    return counting(std::move(points));
  }

  /// Arbitrary continuous grid. The measures must add up to upper - lower.
  static Ptr from_cells(std::vector<double> points, std::vector<double> measures, double lower,
                        double upper) {
    return make(std::move(points), std::move(measures), lower, upper, MeasureKind::Continuous);
  }

  std::size_t size() const noexcept { return points_.size(); }
  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> cell_measures() const noexcept { return measures_; }
  double point(std::size_t i) const { return points_.at(i); }
  double measure(std::size_t i) const { return measures_.at(i); }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  MeasureKind kind() const noexcept { return kind_; }
  double total_measure() const { return detail::compensated_sum(measures_); }

  /// Identity or element-wise equality.
  bool same_as(const SupportGrid& other) const noexcept {
    return this == &other || (kind_ == other.kind_ && lower_ == other.lower_ &&
                              upper_ == other.upper_ && points_ == other.points_ &&
                              measures_ == other.measures_);
  }

 private:
  SupportGrid(std::vector<double> points, std::vector<double> measures, double lower, double upper,
              MeasureKind kind)
      : points_(std::move(points)),
        measures_(std::move(measures)),
        lower_(lower),
        upper_(upper),
        kind_(kind) {}

  static Ptr make(std::vector<double> points, std::vector<double> measures, double lower,
                  double upper, MeasureKind kind) {
    validate(points, measures, lower, upper, kind);
    return Ptr(new SupportGrid(std::move(points), std::move(measures), lower, upper, kind));
  }

  static void check_bounds(double lower, double upper, std::size_t n) {
    if (n < 2) throw Error(ErrorKind::InvalidGrid, "a grid needs at least 2 points");
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
      throw Error(ErrorKind::InvalidGrid, "grid bounds must be finite with lower < upper");
    }
  }

  static void validate(const std::vector<double>& points, const std::vector<double>& measures,
                       double lower, double upper, MeasureKind kind) {
    if (points.size() < 2) throw Error(ErrorKind::InvalidGrid, "a grid needs at least 2 points");
    if (points.size() != measures.size()) {
      throw Error(ErrorKind::LengthMismatch, "points and cell measures differ in length");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i])) throw Error(ErrorKind::InvalidGrid, "non-finite grid point");
      if (i > 0 && !(points[i] > points[i - 1])) {
        throw Error(ErrorKind::InvalidGrid,
                    "grid points must be strictly increasing (index " + std::to_string(i) + ")");
      }
      if (!(measures[i] > 0.0) || !std::isfinite(measures[i])) {
        throw Error(ErrorKind::InvalidGrid,
                    "cell measures must be positive (index " + std::to_string(i) + ")");
      }
    }
    if (kind == MeasureKind::Continuous) {
      if (points.front() < lower || points.back() > upper) {
        throw Error(ErrorKind::InvalidGrid, "grid points lie outside [lower, upper]");
      }
      const double range = upper - lower;
      const double total = detail::compensated_sum(measures);
      if (std::abs(total - range) > 1e-12 * std::max(1.0, range)) {
        throw Error(ErrorKind::InvalidGrid, "cell measures do not add up to upper - lower");
      }
    } else if (std::any_of(measures.begin(), measures.end(), [](double m) { return m != 1.0; })) {
      throw Error(ErrorKind::InvalidGrid, "counting grids use unit cell measures");
    }
  }

  std::vector<double> points_;
  std::vector<double> measures_;
  double lower_;
  double upper_;
  MeasureKind kind_;
};

}  // namespace wupd
