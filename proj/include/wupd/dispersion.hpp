#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wupd/density.hpp"
#include "wupd/error.hpp"
#include "wupd/grid.hpp"

namespace wupd {

struct AnalysisOptions {
  /// Pairwise scans run on at most this many points; larger grids are
  /// subsampled uniformly (first and last point always kept).
  std::size_t max_pairwise_points = 512;
  double tie_tolerance = kTieTolerance;
  /// A pair tied on one side and differing by less than this (relative) on the
  /// other is too close to call in double precision and is skipped.
  double ambiguity_band = 1e-9;
  double entropy_tolerance = 1e-8;
  std::size_t max_witnesses = 64;
};

enum class RelationKind { MonotoneDispersion, MonotoneConcentration, Identical, Neither };

inline const char* to_string(RelationKind kind) noexcept {
  switch (kind) {
    case RelationKind::MonotoneDispersion: return "MonotoneDispersion";
    case RelationKind::MonotoneConcentration: return "MonotoneConcentration";
    case RelationKind::Identical: return "Identical";
    case RelationKind::Neither: return "Neither";
  }
  return "Unknown";
}

/// The defining conditions of a monotone dispersion: equal values stay equal,
/// order is preserved, and density ratios are strictly compressed.
enum class Condition { Equality = 4, Order = 5, Ratio = 6 };

struct PairWitness {
  std::size_t first;
  std::size_t second;
  double omega1;
  double omega2;
  Condition condition;
};

struct RelationVerdict {
  RelationKind kind = RelationKind::Neither;
  std::vector<PairWitness> violations;  ///< capped at AnalysisOptions::max_witnesses
  std::size_t violation_count = 0;
  std::size_t points_scanned = 0;
};

/// Evenly spaced indices into [0, n), at most `cap` of them.
inline std::vector<std::size_t> analysis_indices(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (cap < 2 || n <= cap) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  idx.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) {
    idx.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(n - 1) / static_cast<double>(cap - 1))));
  }
  return idx;
}

namespace detail {

class WitnessLog {
 public:
  WitnessLog(const SupportGrid& grid, std::size_t cap) : grid_(grid), cap_(cap) {}

  void add(std::size_t i, std::size_t j, Condition c) {
    ++count_;
    if (items_.size() < cap_) items_.push_back({i, j, grid_.point(i), grid_.point(j), c});
  }
  std::size_t count() const noexcept { return count_; }
  std::vector<PairWitness> take() { return std::move(items_); }

 private:
  const SupportGrid& grid_;
  std::size_t cap_;
  std::size_t count_ = 0;
  std::vector<PairWitness> items_;
};

}  // namespace detail

/// Decides how Gamma relates to g. MonotoneDispersion means Gamma is a
/// monotone dispersion of g; MonotoneConcentration means Gamma is a monotone
/// concentration of g (g disperses Gamma).
inline RelationVerdict classify_relation(const GridDensity& g, const GridDensity& gamma,
                                         const AnalysisOptions& options = {}) {
  require_same_grid(g, gamma);
  const double tie = options.tie_tolerance;
  const auto idx = analysis_indices(g.size(), options.max_pairwise_points);

  RelationVerdict verdict;
  verdict.points_scanned = idx.size();

  bool identical = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!nearly_equal(g[i], gamma[i], tie)) {
      identical = false;
      break;
    }
  }

  detail::WitnessLog order_log(g.grid(), options.max_witnesses);
  detail::WitnessLog dispersion_log(g.grid(), options.max_witnesses);
  detail::WitnessLog concentration_log(g.grid(), options.max_witnesses);
  bool any_strict = false;

  for (std::size_t a = 0; a < idx.size(); ++a) {
    const std::size_t i = idx[a];
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const std::size_t j = idx[b];
      const bool tie_g = nearly_equal(g[i], g[j], tie);
      const bool tie_gamma = nearly_equal(gamma[i], gamma[j], tie);
      if (tie_g != tie_gamma) {
        const bool near_g = nearly_equal(g[i], g[j], options.ambiguity_band);
        const bool near_gamma = nearly_equal(gamma[i], gamma[j], options.ambiguity_band);
        if (!(near_g && near_gamma)) order_log.add(i, j, Condition::Equality);
        continue;
      }
      if (tie_g) continue;
      const bool g_up = g[i] > g[j];
      if (g_up != (gamma[i] > gamma[j])) {
        order_log.add(i, j, Condition::Order);
        continue;
      }
      any_strict = true;
      const std::size_t hi = g_up ? i : j;
      const std::size_t lo = g_up ? j : i;
      // g_hi / g_lo versus gamma_hi / gamma_lo, cross-multiplied.
      const double g_ratio_side = g[hi] * gamma[lo];
      const double gamma_ratio_side = gamma[hi] * g[lo];
      if (!(g_ratio_side > gamma_ratio_side)) dispersion_log.add(hi, lo, Condition::Ratio);
      if (!(gamma_ratio_side > g_ratio_side)) concentration_log.add(hi, lo, Condition::Ratio);
    }
  }

  if (order_log.count() > 0) {
    verdict.kind = RelationKind::Neither;
    verdict.violation_count = order_log.count();
    verdict.violations = order_log.take();
  } else if (identical) {
    verdict.kind = RelationKind::Identical;
  } else if (!any_strict) {
    // Both flat on the scanned points but different somewhere else.
    verdict.kind = RelationKind::Neither;
    verdict.violation_count = 1;
    verdict.violations.push_back(
        {idx.front(), idx.back(), g.grid().point(idx.front()), g.grid().point(idx.back()),
         Condition::Ratio});
  } else if (dispersion_log.count() == 0) {
    verdict.kind = RelationKind::MonotoneDispersion;
  } else if (concentration_log.count() == 0) {
    verdict.kind = RelationKind::MonotoneConcentration;
  } else {
    verdict.kind = RelationKind::Neither;
    verdict.violation_count = dispersion_log.count() + concentration_log.count();
    verdict.violations = dispersion_log.take();
    for (auto& w : concentration_log.take()) {
      if (verdict.violations.size() >= options.max_witnesses) break;
      verdict.violations.push_back(w);
    }
  }
  return verdict;
}

namespace detail {

inline void require_dispersion(const GridDensity& g, const GridDensity& gamma,
                               const AnalysisOptions& options, const char* what) {
  const auto verdict = classify_relation(g, gamma, options);
  if (verdict.kind != RelationKind::MonotoneDispersion) {
    throw Error(ErrorKind::NotADispersionPair,
                std::string(what) + " needs Gamma to be a monotone dispersion of g, got " +
                    to_string(verdict.kind));
  }
}

}  // namespace detail

struct ComparisonSets {
  std::vector<std::size_t> below;  ///< g <= Gamma
  std::vector<std::size_t> above;  ///< g >= Gamma
};

/// Points where g <= Gamma and where g >= Gamma. Both are nonempty for any two
/// densities on the same grid.
inline ComparisonSets comparison_sets(const GridDensity& g, const GridDensity& gamma) {
  require_same_grid(g, gamma);
  ComparisonSets sets;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] <= gamma[i]) sets.below.push_back(i);
    if (g[i] >= gamma[i]) sets.above.push_back(i);
  }
  return sets;
}

struct BoundsReport {
  double b = 0.0;  ///< max of Gamma over {g <= Gamma}
  double B = 0.0;  ///< min of Gamma over {g >= Gamma}
  double r = 0.0;
  bool below_set_nonempty = false;
  bool above_set_nonempty = false;
};

/// b, B and the pivot r for a pair where Gamma is a monotone dispersion of g.
/// `r_override` must lie in [b, B]; the default is the midpoint.
inline BoundsReport bounds_bB(const GridDensity& g, const GridDensity& gamma,
                              std::optional<double> r_override = std::nullopt,
                              const AnalysisOptions& options = {}) {
  detail::require_dispersion(g, gamma, options, "bounds_bB");
  const auto sets = comparison_sets(g, gamma);
  BoundsReport out;
  out.below_set_nonempty = !sets.below.empty();
  out.above_set_nonempty = !sets.above.empty();
  if (!out.below_set_nonempty || !out.above_set_nonempty) {
    throw Error(ErrorKind::InvariantViolation, "a comparison set is empty");
  }
  out.b = gamma[sets.below.front()];
  for (std::size_t i : sets.below) out.b = std::max(out.b, gamma[i]);
  out.B = gamma[sets.above.front()];
  for (std::size_t i : sets.above) out.B = std::min(out.B, gamma[i]);
  if (out.b > out.B) {
    throw Error(ErrorKind::InvariantViolation,
                "b = " + std::to_string(out.b) + " exceeds B = " + std::to_string(out.B));
  }
  if (r_override) {
    if (*r_override < out.b || *r_override > out.B) {
      throw Error(ErrorKind::InvalidParameter, "r must lie in [b, B]");
    }
    out.r = *r_override;
  } else {
    out.r = 0.5 * (out.b + out.B);
  }
  return out;
}

/// Points where (g - Gamma) and (log Gamma - log r) have strictly opposite signs.
inline std::vector<std::size_t> sign_property_violations(const GridDensity& g,
                                                         const GridDensity& gamma, double r) {
  require_same_grid(g, gamma);
  std::vector<std::size_t> bad;
  const double log_r = std::log(r);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double diff = g[i] - gamma[i];
    const double log_diff = std::log(gamma[i]) - log_r;
    if ((diff > 0.0 && log_diff < 0.0) || (diff < 0.0 && log_diff > 0.0)) bad.push_back(i);
  }
  return bad;
}

struct ImplicationCheck {
  bool holds = true;
  std::vector<PairWitness> witnesses;
  std::size_t pairs_checked = 0;
  std::size_t pairs_triggered = 0;
};

/// "Higher highs, lower lows": over all ordered pairs,
///   g1 > g2 >= Gamma2  =>  g1 > Gamma1,   and   g1 < g2 <= Gamma2  =>  g1 < Gamma1.
inline ImplicationCheck verify_higher_highs(const GridDensity& g, const GridDensity& gamma,
                                            const AnalysisOptions& options = {}) {
  detail::require_dispersion(g, gamma, options, "verify_higher_highs");
  const auto idx = analysis_indices(g.size(), options.max_pairwise_points);
  ImplicationCheck out;
  for (std::size_t i : idx) {
    for (std::size_t j : idx) {
      if (i == j) continue;
      ++out.pairs_checked;
      bool violated = false;
      if (g[i] > g[j] && g[j] >= gamma[j]) {
        ++out.pairs_triggered;
        violated = !(g[i] > gamma[i]);
      } else if (g[i] < g[j] && g[j] <= gamma[j]) {
        ++out.pairs_triggered;
        violated = !(g[i] < gamma[i]);
      }
      if (violated) {
        out.holds = false;
        if (out.witnesses.size() < options.max_witnesses) {
          out.witnesses.push_back({i, j, g.grid().point(i), g.grid().point(j), Condition::Order});
        }
      }
    }
  }
  return out;
}

struct MaxDominanceReport {
  bool holds = true;
  bool strict_required = false;  ///< M({g < max g}) > 0
  std::vector<std::size_t> maximizers;
};

/// At every maximizer of g, g >= Gamma; strictly when the points below the
/// maximum carry positive measure.
inline MaxDominanceReport verify_max_dominance(const GridDensity& g, const GridDensity& gamma,
                                               const AnalysisOptions& options = {}) {
  detail::require_dispersion(g, gamma, options, "verify_max_dominance");
  MaxDominanceReport out;
  out.maximizers = mode_indices(g, options.tie_tolerance);
  const double peak = g[out.maximizers.front()];
  double below_measure = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < peak && !nearly_equal(g[i], peak, options.tie_tolerance)) {
      below_measure += g.grid().measure(i);
    }
  }
  out.strict_required = below_measure > 0.0;
  for (std::size_t m : out.maximizers) {
    const bool ok = out.strict_required ? g[m] > gamma[m] : g[m] >= gamma[m];
    if (!ok) out.holds = false;
  }
  return out;
}

enum class Ordering { Greater, Less, EqualWithinTol };

inline const char* to_string(Ordering o) noexcept {
  switch (o) {
    case Ordering::Greater: return "Greater";
    case Ordering::Less: return "Less";
    case Ordering::EqualWithinTol: return "EqualWithinTol";
  }
  return "Unknown";
}

struct EntropyOrdering {
  Ordering ordering = Ordering::EqualWithinTol;  ///< H(Gamma) relative to H(g)
  double entropy_g = 0.0;
  double entropy_gamma = 0.0;
  double difference = 0.0;  ///< H(Gamma) - H(g)
  RelationKind relation = RelationKind::Neither;
  bool theorem_applicable = false;  ///< the pair is a dispersion/concentration pair
  bool strict_required = false;
  bool theorem_holds = true;
  std::optional<BoundsReport> bounds;
};

/// Entropy comparison. When one density is a monotone dispersion of the other,
/// the dispersed one must have at least as much entropy, and strictly more when
/// the dispersed density differs from the pivot r on a set of positive measure.
inline EntropyOrdering entropy_ordering(const GridDensity& g, const GridDensity& gamma,
                                        const AnalysisOptions& options = {}) {
  require_same_grid(g, gamma);
  EntropyOrdering out;
  out.entropy_g = entropy(g);
  out.entropy_gamma = entropy(gamma);
  out.difference = out.entropy_gamma - out.entropy_g;
  if (out.difference > options.entropy_tolerance) {
    out.ordering = Ordering::Greater;
  } else if (out.difference < -options.entropy_tolerance) {
    out.ordering = Ordering::Less;
  }

  out.relation = classify_relation(g, gamma, options).kind;
  if (out.relation != RelationKind::MonotoneDispersion &&
      out.relation != RelationKind::MonotoneConcentration) {
    return out;
  }
  const bool gamma_disperses = out.relation == RelationKind::MonotoneDispersion;
  const GridDensity& concentrated = gamma_disperses ? g : gamma;
  const GridDensity& dispersed = gamma_disperses ? gamma : g;
  const double gain = gamma_disperses ? out.difference : -out.difference;

  out.theorem_applicable = true;
  out.bounds = bounds_bB(concentrated, dispersed, std::nullopt, options);
  double off_pivot = 0.0;
  for (std::size_t i = 0; i < dispersed.size(); ++i) {
    if (std::abs(dispersed[i] - out.bounds->r) > options.tie_tolerance * out.bounds->r) {
      off_pivot += dispersed.grid().measure(i);
    }
  }
  out.strict_required = off_pivot > 0.0;
  out.theorem_holds = out.strict_required ? gain > 0.0 : gain >= -options.entropy_tolerance;
  return out;
}

}  // namespace wupd
