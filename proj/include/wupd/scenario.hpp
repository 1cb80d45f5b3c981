#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wupd/config.hpp"
#include "wupd/density.hpp"
#include "wupd/dispersion.hpp"
#include "wupd/families.hpp"
#include "wupd/random.hpp"
#include "wupd/updating.hpp"

namespace wupd {

inline constexpr std::size_t kDefaultGridPoints = 2001;

/// Grid resolution when the config gives none: WUPD_GRID_POINTS, else 2001.
inline std::size_t default_grid_points() {
  const char* env = std::getenv("WUPD_GRID_POINTS");
  if (env == nullptr || *env == '\0') return kDefaultGridPoints;
  const std::string text(env);
  std::size_t n = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || end != text.data() + text.size() || n < 2) {
    throw Error(ErrorKind::ConfigInvalid, "WUPD_GRID_POINTS must be an integer >= 2, got '" + text + "'");
  }
  return n;
}

/// 17 significant digits, shortest exponent form.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Parameter grid for a prior family under the config's grid settings.
inline SupportGrid::Ptr resolve_grid(const GridConfig& g, const AnalyticFamily& family) {
  GridOptions opts;
  opts.points = g.points.value_or(default_grid_points());
  opts.epsilon = g.epsilon;
  if (g.kind == GridKind::Counting) {
    throw Error(ErrorKind::ConfigInvalid, "$.grid.kind: a counting grid needs explicit values");
  }
  const bool is_beta = std::holds_alternative<Beta>(family);
  if (is_beta && (g.lower || g.upper)) {
    throw Error(ErrorKind::ConfigInvalid, "$.grid: Beta grids cover (0, 1); use epsilon instead");
  }
  if (is_beta) {
    opts.beta_kind = g.kind == GridKind::Uniform ? BetaGridKind::UniformClipped : BetaGridKind::SineMapped;
    return default_grid(family, opts);
  }
  if (g.kind == GridKind::Sine || g.lower || g.upper) {
    const auto base = default_grid(family, opts);
    const double lo = g.lower.value_or(base->lower());
    const double hi = g.upper.value_or(base->upper());
    if (!(lo < hi)) throw Error(ErrorKind::ConfigInvalid, "$.grid: lower must be below upper");
    return g.kind == GridKind::Sine ? SupportGrid::sine_mapped(lo, hi, opts.points)
                                    : SupportGrid::uniform(lo, hi, opts.points);
  }
  return default_grid(family, opts);
}

inline std::vector<Observation> materialize(const ObservationSource& source) {
  if (const auto* list = std::get_if<std::vector<Observation>>(&source)) return *list;
  std::vector<Observation> out;
  if (const auto* b = std::get_if<BernoulliGenerator>(&source)) {
    Rng rng(b->seed);
    out.reserve(b->count);
    for (std::size_t i = 0; i < b->count; ++i) out.push_back(rng.bernoulli(b->theta) ? 1.0 : 0.0);
    return out;
  }
  const auto& n = std::get<NormalGenerator>(source);
  Rng rng(n.seed);
  out.reserve(n.count);
  const double sd = std::sqrt(n.variance);
  for (std::size_t i = 0; i < n.count; ++i) out.push_back(rng.normal(n.mean, sd));
  return out;
}

inline LikelihoodModel make_model(const LikelihoodSpec& spec, SupportGrid::Ptr grid) {
  if (const auto* n = std::get_if<NormalLikelihood>(&spec)) {
    return LikelihoodModel::normal_known_variance(std::move(grid), n->variance);
  }
  return LikelihoodModel::bernoulli(std::move(grid));
}

inline WeightFn as_weight_fn(const AlphaSpec& a) {
  if (const double* v = std::get_if<double>(&a)) return [w = *v](std::size_t) { return w; };
  return std::get<NamedSchedule>(a);
}

inline WeightFn as_weight_fn(const BetaSpec& b) {
  if (const double* v = std::get_if<double>(&b)) return [w = *v](std::size_t) { return w; };
  if (const auto* s = std::get_if<NamedSchedule>(&b)) return *s;
  throw Error(ErrorKind::ConfigInvalid, "$.weights.betas: a list needs the discrimination form");
}

inline WeightSchedule as_schedule(const WeightsConfig& w) {
  const double alpha = std::holds_alternative<double>(w.alpha) ? std::get<double>(w.alpha)
                                                               : std::get<NamedSchedule>(w.alpha)(0);
  if (const auto* list = std::get_if<std::vector<double>>(&w.betas)) {
    return WeightSchedule::per_observation(alpha, *list);
  }
  return WeightSchedule(alpha, as_weight_fn(w.betas));
}

struct ScenarioResult {
  BeliefTrajectory trajectory;
  double bayes_final_entropy = 0.0;
  std::string csv;
  std::string summary_json;
};

namespace scenario_detail {

inline std::string trajectory_csv(const BeliefTrajectory& tr) {
  std::string out = "step,observation,posterior_mean,posterior_variance,posterior_entropy,alpha,beta\n";
  for (std::size_t t = 0; t < tr.posteriors.size(); ++t) {
    const auto m = moments(tr.posteriors[t]);
    out += std::to_string(t);
    out += ',';
    if (t > 0) out += format_double(tr.observations[t - 1]);
    out += ',' + format_double(m.mean) + ',' + format_double(m.variance) + ',' +
           format_double(tr.entropies[t]) + ',' + format_double(tr.alphas[t]) + ',';
    if (t > 0) out += format_double(tr.betas[t - 1]);
    out += '\n';
  }
  return out;
}

inline Json density_summary(const GridDensity& d) {
  const auto m = moments(d);
  return Json{{"mean", m.mean},
              {"variance", m.variance},
              {"entropy", entropy(d)},
              {"modes", m.mode_points}};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << content;
  if (!out.flush()) throw Error(ErrorKind::IoError, "write failed for " + path);
}

}  // namespace scenario_detail

/// Runs a learning scenario and renders its CSV trajectory and JSON summary.
/// The summary compares against a Bayesian (alpha = beta = 1) run on the same data.
inline ScenarioResult run_scenario(const ScenarioConfig& config) {
  const auto grid = resolve_grid(config.grid, config.prior);
  const GridDensity prior = to_grid(config.prior, grid);
  const LikelihoodModel model = make_model(config.likelihood, grid);
  const auto observations = materialize(config.observations);

  ScenarioResult out;
  if (config.weights.form == UpdateForm::TimeVarying) {
    out.trajectory = time_varying_trajectory(prior, model, observations,
                                             as_weight_fn(config.weights.alpha),
                                             as_weight_fn(config.weights.betas));
  } else {
    out.trajectory = sequential_weighted_posterior(prior, model, observations,
                                                   as_schedule(config.weights));
  }
  const auto bayes = time_varying_posterior(prior, model, observations,
                                            [](std::size_t) { return 1.0; },
                                            [](std::size_t) { return 1.0; });
  out.bayes_final_entropy = entropy(bayes);

  const auto& final = out.trajectory.final_posterior();
  Json summary{{"steps", observations.size()},
               {"grid", {{"points", grid->size()}, {"lower", grid->lower()}, {"upper", grid->upper()}}},
               {"final", scenario_detail::density_summary(final)},
               {"bayes_final_entropy", out.bayes_final_entropy},
               {"entropy_gap_vs_bayes", out.trajectory.entropies.back() - out.bayes_final_entropy}};
  out.csv = scenario_detail::trajectory_csv(out.trajectory);
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

inline void write_outputs(const OutputConfig& outputs, const std::string& csv, const std::string& json) {
  if (outputs.csv && !csv.empty()) scenario_detail::write_file(*outputs.csv, csv);
  if (outputs.json) scenario_detail::write_file(*outputs.json, json);
}

/// One-shot weighted posterior pi^alpha(t) f(h_t)^beta(t) over the whole batch.
/// The CSV lists the posterior density on the grid.
struct UpdateResult {
  std::optional<GridDensity> posterior;
  std::string csv;
  std::string summary_json;
};

inline UpdateResult run_update(const ScenarioConfig& config) {
  if (std::holds_alternative<std::vector<double>>(config.weights.betas)) {
    throw Error(ErrorKind::ConfigInvalid, "$.weights.betas: update takes a scalar or a schedule");
  }
  const auto grid = resolve_grid(config.grid, config.prior);
  const GridDensity prior = to_grid(config.prior, grid);
  const LikelihoodModel model = make_model(config.likelihood, grid);
  const auto observations = materialize(config.observations);
  const WeightFn alpha = as_weight_fn(config.weights.alpha);
  const WeightFn beta = as_weight_fn(config.weights.betas);
  GridDensity post = time_varying_posterior(prior, model, observations, alpha, beta);
  const GridDensity bayes = time_varying_posterior(prior, model, observations,
                                                   [](std::size_t) { return 1.0; },
                                                   [](std::size_t) { return 1.0; });
  UpdateResult out;
  const std::size_t t = observations.size();
  Json summary{{"observations", t},
               {"alpha", alpha(t)},
               {"beta", t > 0 ? Json(beta(t)) : Json(nullptr)},
               {"posterior", scenario_detail::density_summary(post)},
               {"bayes_entropy", entropy(bayes)},
               {"entropy_gap_vs_bayes", entropy(post) - entropy(bayes)}};
  out.summary_json = summary.dump(2) + "\n";
  out.csv = "theta,density\n";
  for (std::size_t i = 0; i < post.size(); ++i) {
    out.csv += format_double(grid->point(i)) + ',' + format_double(post[i]) + '\n';
  }
  out.posterior = std::move(post);
  return out;
}

struct AnalyzeResult {
  Json report;
  bool theorems_hold = true;  ///< false when a dispersion pair violates a theorem
};

namespace scenario_detail {

inline SupportGrid::Ptr analysis_grid(const AnalyzeConfig& c) {
  const auto* values = std::get_if<std::vector<double>>(&c.g.source);
  const auto* family = std::get_if<AnalyticFamily>(&c.g.source);
  if (values != nullptr) {
    if (c.grid.kind == GridKind::Counting || c.grid.kind == GridKind::Default) {
      return SupportGrid::counting(values->size());
    }
    if (!c.grid.lower || !c.grid.upper) {
      throw Error(ErrorKind::ConfigInvalid, "$.grid: explicit values on a continuous grid need lower and upper");
    }
    return c.grid.kind == GridKind::Sine ? SupportGrid::sine_mapped(*c.grid.lower, *c.grid.upper, values->size())
                                         : SupportGrid::uniform(*c.grid.lower, *c.grid.upper, values->size());
  }
  if (family == nullptr) throw Error(ErrorKind::ConfigInvalid, "$.g: expected a family or values");
  return resolve_grid(c.grid, *family);
}

inline GridDensity build(const DensitySpec& spec, const SupportGrid::Ptr& grid,
                         const GridDensity* g, const char* path) {
  if (const auto* values = std::get_if<std::vector<double>>(&spec.source)) {
    if (values->size() != grid->size()) {
      throw Error(ErrorKind::ConfigInvalid, std::string(path) + ".values: length " +
                                                std::to_string(values->size()) + " does not match grid size " +
                                                std::to_string(grid->size()));
    }
    return normalize(*values, grid);
  }
  if (const auto* gamma = std::get_if<double>(&spec.source)) return power_transform(*g, *gamma);
  return to_grid(std::get<AnalyticFamily>(spec.source), grid);
}

inline Json witnesses_json(const std::vector<PairWitness>& ws) {
  Json out = Json::array();
  for (const auto& w : ws) {
    out.push_back({{"first", w.first},
                   {"second", w.second},
                   {"omega1", w.omega1},
                   {"omega2", w.omega2},
                   {"condition", static_cast<int>(w.condition)}});
  }
  return out;
}

}  // namespace scenario_detail

/// Relation, bounds, entropy ordering and theorem checks for two densities.
inline AnalyzeResult run_analyze(const AnalyzeConfig& config) {
  const auto grid = scenario_detail::analysis_grid(config);
  const GridDensity g = scenario_detail::build(config.g, grid, nullptr, "$.g");
  const GridDensity gamma = scenario_detail::build(config.gamma, grid, &g, "$.Gamma");

  AnalyzeResult out;
  const auto verdict = classify_relation(g, gamma);
  const auto eo = entropy_ordering(g, gamma);
  Json report{{"grid_points", grid->size()},
              {"relation", to_string(verdict.kind)},
              {"violation_count", verdict.violation_count},
              {"violations", scenario_detail::witnesses_json(verdict.violations)},
              {"points_scanned", verdict.points_scanned},
              {"entropy_g", eo.entropy_g},
              {"entropy_Gamma", eo.entropy_gamma},
              {"entropy_difference", eo.difference},
              {"entropy_ordering", to_string(eo.ordering)}};

  const bool dispersion = verdict.kind == RelationKind::MonotoneDispersion;
  const bool concentration = verdict.kind == RelationKind::MonotoneConcentration;
  if (dispersion || concentration) {
    const GridDensity& conc = dispersion ? g : gamma;
    const GridDensity& disp = dispersion ? gamma : g;
    const auto bounds = bounds_bB(conc, disp, config.r);
    const auto sign = sign_property_violations(conc, disp, bounds.r);
    const auto hh = verify_higher_highs(conc, disp);
    const auto md = verify_max_dominance(conc, disp);
    const bool entropy_ok = eo.theorem_applicable && eo.theorem_holds;
    report["bounds"] = {{"oriented_as", dispersion ? "Gamma disperses g" : "g disperses Gamma"},
                        {"b", bounds.b},
                        {"B", bounds.B},
                        {"r", bounds.r}};
    report["checks"] = {{"sign_property_violations", sign.size()},
                        {"higher_highs", hh.holds},
                        {"max_dominance", md.holds},
                        {"entropy_theorem", entropy_ok}};
    out.theorems_hold = sign.empty() && hh.holds && md.holds && entropy_ok;
  } else if (config.r) {
    report["note"] = "r ignored: the densities are not a monotone dispersion pair";
  }
  out.report = std::move(report);
  return out;
}

}  // namespace wupd
