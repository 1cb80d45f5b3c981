#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wupd/density.hpp"
#include "wupd/error.hpp"
#include "wupd/grid.hpp"

namespace wupd {

/// Observations are opaque to the updating engine; only the likelihood model
/// interprets them (Bernoulli uses 0/1, Normal uses the real value).
using Observation = double;

/// f(x_j | h_{j-1}, theta) over a parameter grid, stored as a log density.
class LikelihoodModel {
 public:
  using LogDensityFn =
      std::function<double(Observation x, std::span<const Observation> history, double theta)>;

  LikelihoodModel(SupportGrid::Ptr parameter_grid, LogDensityFn log_density, std::string name)
      : grid_(std::move(parameter_grid)), log_density_(std::move(log_density)), name_(std::move(name)) {
    if (!grid_) throw Error(ErrorKind::InvalidGrid, "likelihood needs a parameter grid");
  }

  /// x in {0, 1}, theta = success probability. The grid must lie inside (0, 1).
  static LikelihoodModel bernoulli(SupportGrid::Ptr parameter_grid) {
    const auto points = parameter_grid->points();
    if (!(points.front() > 0.0) || !(points.back() < 1.0)) {
      throw Error(ErrorKind::SupportMismatch, "Bernoulli parameter grid must lie inside (0, 1)");
    }
    return LikelihoodModel(
        std::move(parameter_grid),
        [](Observation x, std::span<const Observation>, double theta) {
          if (x == 1.0) return std::log(theta);
          if (x == 0.0) return std::log1p(-theta);
          throw Error(ErrorKind::InvalidParameter, "Bernoulli observations must be 0 or 1");
        },
        "bernoulli");
  }

  /// x ~ Normal(theta, variance).
  static LikelihoodModel normal_known_variance(SupportGrid::Ptr parameter_grid, double variance) {
    if (!(variance > 0.0)) throw Error(ErrorKind::InvalidParameter, "variance must be positive");
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * variance);
    return LikelihoodModel(
        std::move(parameter_grid),
        [variance, log_norm](Observation x, std::span<const Observation>, double theta) {
          const double z = x - theta;
          return log_norm - 0.5 * z * z / variance;
        },
        "normal");
  }

  const SupportGrid::Ptr& parameter_grid() const noexcept { return grid_; }
  const std::string& name() const noexcept { return name_; }

  double log_density(Observation x, std::span<const Observation> history, double theta) const {
    const double v = log_density_(x, history, theta);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity() ||
        v == -std::numeric_limits<double>::infinity()) {
      throw Error(ErrorKind::NonPositiveValue,
                  "likelihood " + name_ + " is not positive and finite at theta = " +
                      std::to_string(theta));
    }
    return v;
  }

  double density_of(Observation x, std::span<const Observation> history, double theta) const {
    return std::exp(log_density(x, history, theta));
  }

  /// log f(x_j | h_{j-1}, theta) at every grid point.
  std::vector<double> log_likelihood_curve(std::span<const Observation> observations,
                                           std::size_t j) const {
    const auto history = observations.first(j);
    std::vector<double> out(grid_->size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = log_density(observations[j], history, grid_->point(i));
    }
    return out;
  }

 private:
  SupportGrid::Ptr grid_;
  LogDensityFn log_density_;
  std::string name_;
};

/// A weight as a function of the number of observations consumed.
using WeightFn = std::function<double(std::size_t t)>;

inline double checked_weight(double w, const char* what) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw Error(ErrorKind::NonPositiveWeight,
                std::string(what) + " weight " + std::to_string(w) + " is not positive");
  }
  return w;
}

/// Prior weight alpha and likelihood weights beta. Each is a constant or a
/// function of t; the likelihood weight may also be an explicit list beta_1..beta_n.
class WeightSchedule {
 public:
  using Alpha = std::variant<double, WeightFn>;
  using Betas = std::variant<double, std::vector<double>, WeightFn>;

  WeightSchedule(Alpha alpha, Betas betas) : alpha_(std::move(alpha)), betas_(std::move(betas)) {}

  static WeightSchedule constant(double alpha, double beta) { return {alpha, beta}; }
  static WeightSchedule per_observation(double alpha, std::vector<double> betas) {
    return {alpha, std::move(betas)};
  }
  static WeightSchedule time_varying(WeightFn alpha, WeightFn beta) {
    return {std::move(alpha), std::move(beta)};
  }

  double alpha_at(std::size_t t) const {
    if (const double* a = std::get_if<double>(&alpha_)) return checked_weight(*a, "prior");
    return checked_weight(std::get<WeightFn>(alpha_)(t), "prior");
  }

  /// Weight on observation j (1-based), or beta(t) for a function schedule.
  double beta_at(std::size_t j) const {
    if (const double* b = std::get_if<double>(&betas_)) return checked_weight(*b, "likelihood");
    if (const auto* list = std::get_if<std::vector<double>>(&betas_)) {
      if (j == 0 || j > list->size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "no likelihood weight for observation " + std::to_string(j));
      }
      return checked_weight((*list)[j - 1], "likelihood");
    }
    return checked_weight(std::get<WeightFn>(betas_)(j), "likelihood");
  }

  /// Number of listed betas, when the schedule is an explicit list.
  std::optional<std::size_t> beta_count() const {
    if (const auto* list = std::get_if<std::vector<double>>(&betas_)) return list->size();
    return std::nullopt;
  }

  bool alpha_is_constant() const noexcept { return std::holds_alternative<double>(alpha_); }

 private:
  Alpha alpha_;
  Betas betas_;
};

/// Posterior after each prefix of the observation sequence. Entry 0 is the
/// alpha-weighted prior; entry t follows observation t.
struct BeliefTrajectory {
  std::vector<GridDensity> posteriors;
  std::vector<double> entropies;
  std::vector<Observation> observations;
  std::vector<double> alphas;
  std::vector<double> betas;  ///< betas[t - 1] was used for observation t

  const GridDensity& final_posterior() const { return posteriors.back(); }
};

namespace detail {

inline void require_model_grid(const GridDensity& prior, const LikelihoodModel& model) {
  if (!prior.grid().same_as(*model.parameter_grid())) {
    throw Error(ErrorKind::GridMismatch, "prior and likelihood use different parameter grids");
  }
}

inline std::vector<double> weighted_log_prior(const GridDensity& prior, double alpha) {
  std::vector<double> out(prior.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * std::log(prior[i]);
  return out;
}

}  // namespace detail

/// Density proportional to f(x | theta)^beta pi(theta)^alpha.
inline GridDensity weighted_posterior(const GridDensity& prior, const LikelihoodModel& model,
                                      Observation x, double alpha, double beta) {
  detail::require_model_grid(prior, model);
  checked_weight(alpha, "prior");
  checked_weight(beta, "likelihood");
  auto logs = detail::weighted_log_prior(prior, alpha);
  const Observation obs[] = {x};
  const auto curve = model.log_likelihood_curve(obs, 0);
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] += beta * curve[i];
  return normalize_log(logs, prior.grid_ptr());
}

/// pi^alpha * prod_j f(x_j | h_{j-1})^{beta_j}, recorded after every prefix.
inline BeliefTrajectory sequential_weighted_posterior(const GridDensity& prior,
                                                      const LikelihoodModel& model,
                                                      std::span<const Observation> observations,
                                                      const WeightSchedule& schedule) {
  detail::require_model_grid(prior, model);
  if (const auto count = schedule.beta_count(); count && *count != observations.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(*count) + " likelihood weights for " +
                                               std::to_string(observations.size()) +
                                               " observations");
  }
  if (!schedule.alpha_is_constant()) {
    throw Error(ErrorKind::InvalidParameter,
                "sequential updating takes a constant prior weight; use the time-varying form");
  }
  const double alpha = schedule.alpha_at(0);

  BeliefTrajectory out;
  out.observations.assign(observations.begin(), observations.end());
  auto logs = detail::weighted_log_prior(prior, alpha);
  auto record = [&](double beta_used, bool has_beta) {
    out.posteriors.push_back(normalize_log(logs, prior.grid_ptr()));
    out.entropies.push_back(entropy(out.posteriors.back()));
    out.alphas.push_back(alpha);
    if (has_beta) out.betas.push_back(beta_used);
  };
  record(0.0, false);
  for (std::size_t j = 0; j < observations.size(); ++j) {
    const double beta = schedule.beta_at(j + 1);
    const auto curve = model.log_likelihood_curve(observations, j);
    for (std::size_t i = 0; i < logs.size(); ++i) logs[i] += beta * curve[i];
    record(beta, true);
  }
  return out;
}

/// Joint log likelihood log f(h_t | theta) = sum_j log f(x_j | h_{j-1}, theta).
inline std::vector<double> joint_log_likelihood(const LikelihoodModel& model,
                                                std::span<const Observation> observations) {
  std::vector<double> total(model.parameter_grid()->size(), 0.0);
  for (std::size_t j = 0; j < observations.size(); ++j) {
    const auto curve = model.log_likelihood_curve(observations, j);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += curve[i];
  }
  return total;
}

/// f(h_t | theta)^{beta(t)} pi(theta)^{alpha(t)} with t = number of observations.
/// Every call recomputes from the prior, so earlier steps are reweighted by the
/// current beta(t).
inline GridDensity time_varying_posterior(const GridDensity& prior, const LikelihoodModel& model,
                                          std::span<const Observation> observations,
                                          const WeightFn& alpha_of_t, const WeightFn& beta_of_t) {
  detail::require_model_grid(prior, model);
  const std::size_t t = observations.size();
  const double alpha = checked_weight(alpha_of_t(t), "prior");
  auto logs = detail::weighted_log_prior(prior, alpha);
  if (t > 0) {
    const double beta = checked_weight(beta_of_t(t), "likelihood");
    const auto joint = joint_log_likelihood(model, observations);
    for (std::size_t i = 0; i < logs.size(); ++i) logs[i] += beta * joint[i];
  }
  return normalize_log(logs, prior.grid_ptr());
}

/// time_varying_posterior evaluated on every prefix h_0, h_1, ..., h_n.
inline BeliefTrajectory time_varying_trajectory(const GridDensity& prior,
                                                const LikelihoodModel& model,
                                                std::span<const Observation> observations,
                                                const WeightFn& alpha_of_t,
                                                const WeightFn& beta_of_t) {
  detail::require_model_grid(prior, model);
  BeliefTrajectory out;
  out.observations.assign(observations.begin(), observations.end());
  const std::size_t n = model.parameter_grid()->size();
  std::vector<double> joint(n, 0.0);
  for (std::size_t t = 0; t <= observations.size(); ++t) {
    if (t > 0) {
      const auto curve = model.log_likelihood_curve(observations, t - 1);
      for (std::size_t i = 0; i < n; ++i) joint[i] += curve[i];
    }
    const double alpha = checked_weight(alpha_of_t(t), "prior");
    auto logs = detail::weighted_log_prior(prior, alpha);
    if (t > 0) {
      const double beta = checked_weight(beta_of_t(t), "likelihood");
      for (std::size_t i = 0; i < n; ++i) logs[i] += beta * joint[i];
      out.betas.push_back(beta);
    }
    out.posteriors.push_back(normalize_log(logs, prior.grid_ptr()));
    out.entropies.push_back(entropy(out.posteriors.back()));
    out.alphas.push_back(alpha);
  }
  return out;
}

}  // namespace wupd
