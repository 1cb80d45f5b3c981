#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "wupd/density.hpp"
#include "wupd/error.hpp"
#include "wupd/grid.hpp"

namespace wupd {

struct Beta {
  double a;
  double b;
};

struct NormalKnownVar {
  double mean;
  double variance;
};

/// Density (p - 1) x^-p on [1, inf).
struct Pareto {
  double p;
};

using AnalyticFamily = std::variant<Beta, NormalKnownVar, Pareto>;

inline void validate(const AnalyticFamily& family) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Beta>) {
          if (!(f.a > 0.0) || !(f.b > 0.0) || !std::isfinite(f.a) || !std::isfinite(f.b)) {
            throw Error(ErrorKind::InvalidParameter, "Beta parameters must be positive");
          }
        } else if constexpr (std::is_same_v<T, NormalKnownVar>) {
          if (!std::isfinite(f.mean) || !(f.variance > 0.0) || !std::isfinite(f.variance)) {
            throw Error(ErrorKind::InvalidParameter, "Normal variance must be positive");
          }
        } else {
          if (!(f.p > 1.0) || !std::isfinite(f.p)) {
            throw Error(ErrorKind::InvalidParameter, "Pareto needs p > 1");
          }
        }
      },
      family);
}

inline std::string describe(const AnalyticFamily& family) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Beta>) {
          return "Beta(" + std::to_string(f.a) + ", " + std::to_string(f.b) + ")";
        } else if constexpr (std::is_same_v<T, NormalKnownVar>) {
          return "Normal(" + std::to_string(f.mean) + ", " + std::to_string(f.variance) + ")";
        } else {
          return "Pareto(" + std::to_string(f.p) + ")";
        }
      },
      family);
}

/// True iff the power-transformed Pareto kernel x^(-p gamma) is integrable on
/// [1, inf). At p gamma == 1 the tail integral grows like log x.
inline bool pareto_power_integrable(double p, double gamma) {
  if (!(p > 1.0)) throw Error(ErrorKind::InvalidParameter, "Pareto needs p > 1");
  if (!(gamma > 0.0)) throw Error(ErrorKind::NonPositiveGamma, "gamma must be positive");
  return p * gamma > 1.0;
}

/// Family of the normalized f^gamma.
inline AnalyticFamily analytic_power(const AnalyticFamily& family, double gamma) {
  validate(family);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::NonPositiveGamma, "gamma must be positive and finite");
  }
  return std::visit(
      [gamma](const auto& f) -> AnalyticFamily {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Beta>) {
          if (gamma == 1.0) return f;
          const double a = gamma * (f.a - 1.0) + 1.0;
          const double b = gamma * (f.b - 1.0) + 1.0;
          if (!(a > 0.0) || !(b > 0.0)) {
            throw Error(ErrorKind::DivergentResult,
                        "Beta kernel to the power " + std::to_string(gamma) + " is not integrable");
          }
          return Beta{a, b};
        } else if constexpr (std::is_same_v<T, NormalKnownVar>) {
          return NormalKnownVar{f.mean, f.variance / gamma};
        } else {
          if (!pareto_power_integrable(f.p, gamma)) {
            throw Error(ErrorKind::DivergentResult,
                        "Pareto tail diverges: p * gamma = " + std::to_string(f.p * gamma));
          }
          return Pareto{f.p * gamma};
        }
      },
      family);
}

struct FamilySummary {
  double mean;
  double variance;
  double entropy;
};

inline double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Closed-form mean, variance and differential entropy (nats). Pareto moments
/// that do not exist are reported as +inf.
inline FamilySummary analytic_moments_entropy(const AnalyticFamily& family) {
  validate(family);
  return std::visit(
      [](const auto& f) -> FamilySummary {
        using T = std::decay_t<decltype(f)>;
        using boost::math::digamma;
        if constexpr (std::is_same_v<T, Beta>) {
          const double s = f.a + f.b;
          const double h = log_beta_function(f.a, f.b) - (f.a - 1.0) * digamma(f.a) -
                           (f.b - 1.0) * digamma(f.b) + (s - 2.0) * digamma(s);
          return {f.a / s, f.a * f.b / (s * s * (s + 1.0)), h};
        } else if constexpr (std::is_same_v<T, NormalKnownVar>) {
          return {f.mean, f.variance,
                  0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * f.variance)};
        } else {
          // Type I Pareto with scale 1 and shape k = p - 1.
          constexpr double inf = std::numeric_limits<double>::infinity();
          const double k = f.p - 1.0;
          const double mean = k > 1.0 ? k / (k - 1.0) : inf;
          const double var = k > 2.0 ? k / ((k - 1.0) * (k - 1.0) * (k - 2.0)) : inf;
          return {mean, var, -std::log(k) + 1.0 / k + 1.0};
        }
      },
      family);
}

inline bool in_support(const AnalyticFamily& family, double x) {
  return std::visit(
      [x](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Beta>) {
          return x > 0.0 && x < 1.0;
        } else if constexpr (std::is_same_v<T, NormalKnownVar>) {
          return std::isfinite(x);
        } else {
          return x >= 1.0 && std::isfinite(x);
        }
      },
      family);
}

/// Normalized log density at x (x inside the support).
inline double log_density(const AnalyticFamily& family, double x) {
  return std::visit(
      [x](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Beta>) {
          return (f.a - 1.0) * std::log(x) + (f.b - 1.0) * std::log1p(-x) -
                 log_beta_function(f.a, f.b);
        } else if constexpr (std::is_same_v<T, NormalKnownVar>) {
          const double z = x - f.mean;
          return -0.5 * z * z / f.variance - 0.5 * std::log(2.0 * std::numbers::pi * f.variance);
        } else {
          return std::log(f.p - 1.0) - f.p * std::log(x);
        }
      },
      family);
}

/// Evaluates the family at each grid point and renormalizes on the grid, i.e.
/// the family truncated to the grid's support.
inline GridDensity to_grid(const AnalyticFamily& family, SupportGrid::Ptr grid) {
  validate(family);
  if (!grid) throw Error(ErrorKind::InvalidGrid, "to_grid needs a grid");
  std::vector<double> logs(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->point(i);
    if (!in_support(family, x)) {
      throw Error(ErrorKind::SupportMismatch, "grid point " + std::to_string(x) +
                                                  " lies outside the support of " +
                                                  describe(family));
    }
    logs[i] = log_density(family, x);
  }
  return normalize_log(logs, std::move(grid));
}

enum class BetaGridKind {
  SineMapped,      ///< cell-centred on (0, 1), clustered at both ends
  UniformClipped,  ///< uniform trapezoid grid on [eps, 1 - eps]
};

struct GridOptions {
  std::size_t points = 2001;
  double epsilon = 1e-6;
  BetaGridKind beta_kind = BetaGridKind::SineMapped;
  double normal_half_width_sd = 8.0;
  double pareto_tail_mass = 1e-8;
};

/// Truncation point U for which the Pareto(p) mass beyond U is `tail`.
inline double pareto_upper_bound(double p, double tail) { return std::pow(tail, -1.0 / (p - 1.0)); }

/// Default analysis grid for a family: Beta on (0, 1), Normal on mean +/- 8 sd,
/// Pareto on [1, U] with geometric cells and omitted tail mass below 1e-8.
inline SupportGrid::Ptr default_grid(const AnalyticFamily& family, const GridOptions& options = {}) {
  validate(family);
  return std::visit(
      [&options](const auto& f) -> SupportGrid::Ptr {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Beta>) {
          if (options.beta_kind == BetaGridKind::UniformClipped) {
            if (!(options.epsilon > 0.0) || !(options.epsilon < 0.5)) {
              throw Error(ErrorKind::InvalidGrid, "epsilon must lie in (0, 0.5)");
            }
            return SupportGrid::uniform(options.epsilon, 1.0 - options.epsilon, options.points);
          }
          return SupportGrid::sine_mapped(0.0, 1.0, options.points);
        } else if constexpr (std::is_same_v<T, NormalKnownVar>) {
          const double half = options.normal_half_width_sd * std::sqrt(f.variance);
          return SupportGrid::uniform(f.mean - half, f.mean + half, options.points);
        } else {
          return SupportGrid::geometric(1.0, pareto_upper_bound(f.p, options.pareto_tail_mass),
                                        options.points);
        }
      },
      family);
}

/// Weighted update of a Beta prior by s successes and f failures:
/// Beta(beta s + alpha (a - 1) + 1, beta f + alpha (b - 1) + 1).
inline Beta weighted_beta_bernoulli(const Beta& prior, double successes, double failures,
                                    double alpha, double beta) {
  validate(prior);
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorKind::NonPositiveWeight, "alpha and beta must be positive");
  }
  if (successes < 0.0 || failures < 0.0) {
    throw Error(ErrorKind::InvalidParameter, "counts must be non-negative");
  }
  const Beta out{beta * successes + alpha * (prior.a - 1.0) + 1.0,
                 beta * failures + alpha * (prior.b - 1.0) + 1.0};
  if (!(out.a > 0.0) || !(out.b > 0.0)) {
    throw Error(ErrorKind::DivergentResult, "weighted Beta posterior is not integrable");
  }
  return out;
}

/// Weighted Normal prior x Normal likelihood over n observations summing to
/// `sum_x`. Precision alpha / prior_var + beta n / like_var.
inline NormalKnownVar weighted_normal_normal_batch(double prior_mean, double prior_var,
                                                   double sum_x, double n, double like_var,
                                                   double alpha, double beta) {
  if (!(prior_var > 0.0) || !(like_var > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "variances must be positive");
  }
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorKind::NonPositiveWeight, "alpha and beta must be positive");
  }
  const double precision = alpha / prior_var + beta * n / like_var;
  const double mean = (alpha * prior_mean / prior_var + beta * sum_x / like_var) / precision;
  return {mean, 1.0 / precision};
}

inline NormalKnownVar weighted_normal_normal(double prior_mean, double prior_var, double x,
                                             double like_var, double alpha, double beta) {
  return weighted_normal_normal_batch(prior_mean, prior_var, x, 1.0, like_var, alpha, beta);
}

}  // namespace wupd
