#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "wupd/error.hpp"
#include "wupd/families.hpp"
#include "wupd/random.hpp"
#include "wupd/updating.hpp"

namespace wupd {

struct BernoulliLikelihood {};

struct NormalLikelihood {
  double variance;
};

using LikelihoodSpec = std::variant<BernoulliLikelihood, NormalLikelihood>;

/// How the subject's beliefs were recorded.
enum class ReportKind {
  PointBeliefs,    ///< posterior means; fitted by least squares
  PosteriorDraws,  ///< draws from the reported posterior; fitted by exact log-likelihood
};

/// One reported belief after `step` observations (step 0 is the prior).
struct BeliefReport {
  std::size_t step;
  double value;
};

struct FitData {
  AnalyticFamily prior;
  LikelihoodSpec likelihood;
  std::vector<Observation> observations;
  ReportKind kind = ReportKind::PointBeliefs;
  std::vector<BeliefReport> reports;
};

struct SearchBox {
  double alpha_min = 0.05;
  double alpha_max = 5.0;
  double beta_min = 0.05;
  double beta_max = 5.0;

  bool contains(double alpha, double beta) const noexcept {
    return alpha >= alpha_min && alpha <= alpha_max && beta >= beta_min && beta <= beta_max;
  }
};

struct FitOptions {
  SearchBox box;
  std::size_t coarse_points = 41;  ///< per axis
  std::size_t refinements = 24;   ///< step halvings
  std::size_t max_moves = 4000;   ///< recentring moves across all halvings
};

struct FitResult {
  double alpha_hat = 1.0;
  double beta_hat = 1.0;
  double log_likelihood = 0.0;
  std::string grid_resolution_used;
  std::size_t evaluations = 0;
};

/// Closed-form weighted posterior along an observation sequence for the two
/// conjugate pairs (Beta-Bernoulli, Normal-Normal).
class ConjugatePath {
 public:
  ConjugatePath(const AnalyticFamily& prior, const LikelihoodSpec& likelihood,
                std::span<const Observation> observations)
      : prior_(prior), likelihood_(likelihood) {
    validate(prior_);
    const bool beta_bernoulli = std::holds_alternative<Beta>(prior_) &&
                                std::holds_alternative<BernoulliLikelihood>(likelihood_);
    const bool normal_normal = std::holds_alternative<NormalKnownVar>(prior_) &&
                               std::holds_alternative<NormalLikelihood>(likelihood_);
    if (!beta_bernoulli && !normal_normal) {
      throw Error(ErrorKind::UnsupportedModel,
                  "weight fitting supports Beta-Bernoulli and Normal-Normal pairs only");
    }
    if (normal_normal && !(std::get<NormalLikelihood>(likelihood_).variance > 0.0)) {
      throw Error(ErrorKind::InvalidParameter, "likelihood variance must be positive");
    }
    // Cumulative statistics for steps 0..n: successes (or sums) and counts.
    first_.assign(observations.size() + 1, 0.0);
    for (std::size_t t = 0; t < observations.size(); ++t) {
      const double x = observations[t];
      if (beta_bernoulli && x != 0.0 && x != 1.0) {
        throw Error(ErrorKind::InvalidParameter, "Bernoulli observations must be 0 or 1");
      }
      first_[t + 1] = first_[t] + x;
    }
  }

  std::size_t steps() const noexcept { return first_.size() - 1; }
  bool is_beta() const noexcept { return std::holds_alternative<Beta>(prior_); }

  /// Posterior after `step` observations, or nullopt when the weights make it
  /// improper.
  std::optional<AnalyticFamily> posterior(std::size_t step, double alpha, double beta) const {
    const double n = static_cast<double>(step);
    if (const auto* b = std::get_if<Beta>(&prior_)) {
      const double a_post = beta * first_[step] + alpha * (b->a - 1.0) + 1.0;
      const double b_post = beta * (n - first_[step]) + alpha * (b->b - 1.0) + 1.0;
      if (!(a_post > 0.0) || !(b_post > 0.0)) return std::nullopt;
      return Beta{a_post, b_post};
    }
    const auto& nk = std::get<NormalKnownVar>(prior_);
    const double like_var = std::get<NormalLikelihood>(likelihood_).variance;
    return weighted_normal_normal_batch(nk.mean, nk.variance, first_[step], n, like_var, alpha,
                                        beta);
  }

  static double posterior_mean(const AnalyticFamily& f) {
    if (const auto* b = std::get_if<Beta>(&f)) return b->a / (b->a + b->b);
    return std::get<NormalKnownVar>(f).mean;
  }

 private:
  AnalyticFamily prior_;
  LikelihoodSpec likelihood_;
  std::vector<double> first_;
};

namespace detail {

inline void check_box(const SearchBox& box) {
  const bool finite = std::isfinite(box.alpha_min) && std::isfinite(box.alpha_max) &&
                      std::isfinite(box.beta_min) && std::isfinite(box.beta_max);
  if (!finite || !(box.alpha_min > 0.0) || !(box.beta_min > 0.0) ||
      !(box.alpha_min < box.alpha_max) || !(box.beta_min < box.beta_max)) {
    throw Error(ErrorKind::SearchBoxInvalid,
                "search box needs 0 < min < max on both axes");
  }
}

struct Candidate {
  double alpha;
  double beta;
  double score;
};

// Higher score wins; near-ties go to the point closer to (1, 1).
inline bool better(const Candidate& c, const Candidate& incumbent) {
  if (!std::isfinite(c.score)) return false;
  if (!std::isfinite(incumbent.score)) return true;
  const double scale = std::max(1.0, std::abs(incumbent.score));
  if (c.score > incumbent.score + 1e-12 * scale) return true;
  if (c.score < incumbent.score - 1e-12 * scale) return false;
  const auto dist = [](const Candidate& x) {
    return std::hypot(x.alpha - 1.0, x.beta - 1.0);
  };
  return dist(c) < dist(incumbent);
}

}  // namespace detail

/// Fit criterion for given weights: the exact log-likelihood of posterior
/// draws, or minus the sum of squared errors of point beliefs.
class FitObjective {
 public:
  explicit FitObjective(const FitData& data)
      : path_(data.prior, data.likelihood, data.observations), kind_(data.kind), reports_(data.reports) {
    if (reports_.empty()) throw Error(ErrorKind::InsufficientData, "no belief reports");
    for (const auto& r : reports_) {
      if (r.step > path_.steps()) {
        throw Error(ErrorKind::InvalidParameter,
                    "report refers to step " + std::to_string(r.step) + " beyond the data");
      }
      if (!std::isfinite(r.value)) throw Error(ErrorKind::InvalidParameter, "non-finite report");
      if (kind_ == ReportKind::PosteriorDraws && path_.is_beta() &&
          !(r.value > 0.0 && r.value < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "Beta posterior draws must lie in (0, 1)");
      }
    }
  }

  double score(double alpha, double beta) const {
    constexpr double minus_inf = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& r : reports_) {
      const auto post = path_.posterior(r.step, alpha, beta);
      if (!post) return minus_inf;
      if (kind_ == ReportKind::PointBeliefs) {
        const double e = r.value - ConjugatePath::posterior_mean(*post);
        total -= e * e;
      } else {
        total += log_density(*post, r.value);
      }
    }
    return total;
  }

  /// Reported log-likelihood. Least squares is reported as the profile
  /// Gaussian log-likelihood of the residuals.
  double log_likelihood(double score) const {
    if (kind_ == ReportKind::PosteriorDraws) return score;
    const double n = static_cast<double>(reports_.size());
    const double sse = std::max(-score, 1e-300);
    return -0.5 * n * (std::log(2.0 * std::numbers::pi * sse / n) + 1.0);
  }

 private:
  ConjugatePath path_;
  ReportKind kind_;
  std::vector<BeliefReport> reports_;
};

/// Grid search for (alpha, beta): a coarse lattice over the box, then a local
/// 5x5 pattern search whose step halves whenever no neighbour improves.
inline FitResult fit_weights(const FitData& data, const FitOptions& options = {}) {
  detail::check_box(options.box);
  if (data.observations.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "weight fitting needs at least 2 observations");
  }
  if (options.coarse_points < 2) {
    throw Error(ErrorKind::SearchBoxInvalid, "coarse lattice needs at least 2 points per axis");
  }
  const FitObjective objective(data);
  const SearchBox& box = options.box;
  std::size_t evaluations = 0;
  auto eval = [&](double a, double b) {
    ++evaluations;
    return detail::Candidate{a, b, objective.score(a, b)};
  };

  const double k = static_cast<double>(options.coarse_points - 1);
  double step_a = (box.alpha_max - box.alpha_min) / k;
  double step_b = (box.beta_max - box.beta_min) / k;
  detail::Candidate best{1.0, 1.0, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < options.coarse_points; ++i) {
    for (std::size_t j = 0; j < options.coarse_points; ++j) {
      const double a = i + 1 == options.coarse_points ? box.alpha_max
                                                      : box.alpha_min + static_cast<double>(i) * step_a;
      const double b = j + 1 == options.coarse_points ? box.beta_max
                                                      : box.beta_min + static_cast<double>(j) * step_b;
      const auto c = eval(a, b);
      if (detail::better(c, best)) best = c;
    }
  }
  if (!std::isfinite(best.score)) {
    throw Error(ErrorKind::SearchBoxInvalid, "no weights in the search box give a proper posterior");
  }

  // Pattern search: recentre on the best neighbour until none improves, then
  // halve the step. Ridges along alpha / beta ~ const need the extra moves.
  step_a *= 0.5;
  step_b *= 0.5;
  std::size_t halvings = 0;
  std::size_t moves = 0;
  while (halvings < options.refinements) {
    const detail::Candidate centre = best;
    for (int da = -2; da <= 2; ++da) {
      for (int db = -2; db <= 2; ++db) {
        if (da == 0 && db == 0) continue;
        const double a = std::clamp(centre.alpha + da * step_a, box.alpha_min, box.alpha_max);
        const double b = std::clamp(centre.beta + db * step_b, box.beta_min, box.beta_max);
        const auto c = eval(a, b);
        if (detail::better(c, best)) best = c;
      }
    }
    const bool moved = best.alpha != centre.alpha || best.beta != centre.beta;
    if (moved && ++moves < options.max_moves) continue;
    step_a *= 0.5;
    step_b *= 0.5;
    ++halvings;
  }

  FitResult out;
  out.alpha_hat = best.alpha;
  out.beta_hat = best.beta;
  out.log_likelihood = objective.log_likelihood(best.score);
  out.evaluations = evaluations;
  std::ostringstream desc;
  desc << "coarse " << options.coarse_points << "x" << options.coarse_points << " lattice on alpha ["
       << box.alpha_min << ", " << box.alpha_max << "], beta [" << box.beta_min << ", "
       << box.beta_max << "]; " << options.refinements << " step halvings of a 5x5 pattern search; final step ("
       << step_a << ", " << step_b << ")";
  out.grid_resolution_used = desc.str();
  return out;
}

/// Parameters for synthesizing a weighted-updating subject.
struct FitSimulation {
  double truth = 0.5;  ///< Bernoulli success probability or Normal mean of the data
  std::size_t count = 500;
  double alpha = 1.0;
  double beta = 1.0;
  ReportKind kind = ReportKind::PointBeliefs;
  std::size_t draws_per_step = 1;
  double report_resolution = 0.01;  ///< point beliefs are rounded to this; 0 disables
  std::uint64_t seed = 1;
};

/// Generates observations and the beliefs a weighted updater would report
/// after each step 0..count.
inline FitData simulate_fit_data(const AnalyticFamily& prior, const LikelihoodSpec& likelihood,
                                 const FitSimulation& sim) {
  Rng rng(sim.seed);
  FitData data{prior, likelihood, {}, sim.kind, {}};
  data.observations.reserve(sim.count);
  for (std::size_t t = 0; t < sim.count; ++t) {
    if (std::holds_alternative<BernoulliLikelihood>(likelihood)) {
      data.observations.push_back(rng.bernoulli(sim.truth) ? 1.0 : 0.0);
    } else {
      data.observations.push_back(
          rng.normal(sim.truth, std::sqrt(std::get<NormalLikelihood>(likelihood).variance)));
    }
  }
  const ConjugatePath path(prior, likelihood, data.observations);
  for (std::size_t t = 0; t <= sim.count; ++t) {
    const auto post = path.posterior(t, sim.alpha, sim.beta);
    if (!post) throw Error(ErrorKind::DivergentResult, "simulated weights give an improper posterior");
    if (sim.kind == ReportKind::PointBeliefs) {
      double m = ConjugatePath::posterior_mean(*post);
      if (sim.report_resolution > 0.0) {
        m = std::round(m / sim.report_resolution) * sim.report_resolution;
      }
      data.reports.push_back({t, m});
      continue;
    }
    for (std::size_t k = 0; k < sim.draws_per_step; ++k) {
      double y = 0.0;
      if (const auto* b = std::get_if<Beta>(&*post)) {
        y = std::clamp(rng.beta(b->a, b->b), 1e-12, 1.0 - 1e-12);
      } else {
        const auto& nk = std::get<NormalKnownVar>(*post);
        y = rng.normal(nk.mean, std::sqrt(nk.variance));
      }
      data.reports.push_back({t, y});
    }
  }
  return data;
}

}  // namespace wupd
