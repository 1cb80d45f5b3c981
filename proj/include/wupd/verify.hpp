#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wupd/density.hpp"
#include "wupd/dispersion.hpp"
#include "wupd/families.hpp"
#include "wupd/random.hpp"

namespace wupd {

enum class Check : std::size_t {
  HigherHighs,      // higher highs, lower lows
  MaxDominance,     // maximum dominance
  PowerDispersion,  // power transform gives dispersion / concentration
  EntropyOrder,     // entropy of the dispersion is at least as large
  EntropyVsGamma,   // entropy ordering matches sign(gamma - 1)
  NonemptySets,     // comparison sets nonempty
  BoundsOrdered,    // b <= B
  SignProperty,     // sign property at r = (b + B) / 2
};

inline constexpr std::size_t kCheckCount = 8;

inline const char* to_string(Check c) noexcept {
  constexpr std::array<const char*, kCheckCount> names = {
      "higher highs", "max dominance", "power dispersion", "entropy order",
      "entropy vs gamma", "nonempty sets", "b <= B", "sign property"};
  return names[static_cast<std::size_t>(c)];
}

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::size_t trials = 100;
  std::size_t grid_points = 512;
  /// Negative control: swap the largest and smallest transformed values so the
  /// transformed density no longer preserves order.
  bool corrupt = false;
  std::optional<double> gamma_override;
  /// Run only the trial with this derived seed (replay of a recorded failure).
  std::optional<std::uint64_t> replay_seed;
};

struct CheckCounts {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t not_applicable = 0;  ///< included in `passed`
};

struct TrialFailure {
  std::size_t trial;
  std::uint64_t trial_seed;
  std::string family;
  double gamma;
  std::vector<Check> failed_checks;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::array<CheckCounts, kCheckCount> counts{};
  std::vector<TrialFailure> failures;

  bool all_passed() const noexcept { return failures.empty(); }
  const CheckCounts& operator[](Check c) const { return counts[static_cast<std::size_t>(c)]; }
};

/// A randomly drawn density and exponent for one verification trial.
struct TrialCase {
  std::string family;
  GridDensity density;
  double gamma;
};

/// Draws a Beta, truncated Normal, or random discrete density and an exponent
/// in [0.2, 5] (log-uniform, avoiding [0.999, 1.001]); one draw in ten uses
/// gamma = 1 exactly.
inline TrialCase draw_trial(std::uint64_t trial_seed, std::size_t grid_points) {
  Rng rng(trial_seed);
  const std::size_t which = rng.index(3);
  std::optional<GridDensity> density;
  std::string family;
  if (which == 0) {
    const Beta f{rng.uniform(0.3, 5.0), rng.uniform(0.3, 5.0)};
    family = describe(f);
    density = to_grid(f, SupportGrid::sine_mapped(0.0, 1.0, grid_points));
  } else if (which == 1) {
    const double sd = rng.uniform(0.3, 2.0);
    const NormalKnownVar f{rng.uniform(-1.0, 1.0), sd * sd};
    family = "truncated " + describe(f) + " on [-3, 3]";
    density = to_grid(f, SupportGrid::uniform(-3.0, 3.0, grid_points));
  } else {
    const std::size_t n = 3 + rng.index(58);
    std::vector<double> raw(n);
    for (double& v : raw) v = std::exp(rng.normal());
    family = "discrete(" + std::to_string(n) + " points)";
    density = normalize(raw, SupportGrid::counting(n));
  }
  double gamma = 1.0;
  if (rng.uniform() >= 0.1) {
    do {
      gamma = std::exp(rng.uniform(std::log(0.2), std::log(5.0)));
    } while (gamma >= 0.999 && gamma <= 1.001);
  }
  return {std::move(family), std::move(*density), gamma};
}

namespace detail {

inline GridDensity corrupt_density(const GridDensity& d) {
  std::vector<double> values(d.values().begin(), d.values().end());
  const auto hi = std::max_element(values.begin(), values.end());
  const auto lo = std::min_element(values.begin(), values.end());
  std::iter_swap(hi, lo);
  return normalize(values, d.grid_ptr());
}

}  // namespace detail

/// Runs every dispersion check on one trial. Returns pass/fail per check with
/// nullopt marking checks that do not apply (gamma == 1).
inline std::array<std::optional<bool>, kCheckCount> run_trial_checks(const TrialCase& tc,
                                                                      bool corrupt) {
  std::array<std::optional<bool>, kCheckCount> out{};
  auto set = [&](Check c, std::optional<bool> v) { out[static_cast<std::size_t>(c)] = v; };

  const GridDensity& d = tc.density;
  const GridDensity t = corrupt ? detail::corrupt_density(power_transform(d, tc.gamma))
                                : power_transform(d, tc.gamma);
  const double gamma = tc.gamma;

  const RelationKind expected = gamma < 1.0   ? RelationKind::MonotoneDispersion
                                : gamma > 1.0 ? RelationKind::MonotoneConcentration
                                              : RelationKind::Identical;
  set(Check::PowerDispersion, classify_relation(d, t).kind == expected);

  const Ordering expected_order = gamma > 1.0   ? Ordering::Less
                                  : gamma < 1.0 ? Ordering::Greater
                                                : Ordering::EqualWithinTol;
  set(Check::EntropyVsGamma, entropy_ordering(d, t).ordering == expected_order);

  // Orient the pair so the second density disperses the first.
  const GridDensity& conc = gamma < 1.0 ? d : t;
  const GridDensity& disp = gamma < 1.0 ? t : d;
  const auto sets = comparison_sets(conc, disp);
  set(Check::NonemptySets, !sets.below.empty() && !sets.above.empty());

  if (gamma == 1.0 && !corrupt) {
    for (Check c : {Check::HigherHighs, Check::MaxDominance, Check::EntropyOrder, Check::BoundsOrdered,
                    Check::SignProperty}) {
      set(c, std::nullopt);
    }
    return out;
  }

  auto guarded = [&](Check c, auto&& body) {
    try {
      set(c, body());
    } catch (const Error&) {
      set(c, false);
    }
  };
  guarded(Check::HigherHighs, [&] { return verify_higher_highs(conc, disp).holds; });
  guarded(Check::MaxDominance, [&] { return verify_max_dominance(conc, disp).holds; });
  guarded(Check::EntropyOrder, [&] {
    const auto eo = entropy_ordering(conc, disp);
    return eo.theorem_applicable && eo.theorem_holds;
  });
  std::optional<BoundsReport> bounds;
  guarded(Check::BoundsOrdered, [&] {
    bounds = bounds_bB(conc, disp);
    return bounds->b <= bounds->B;
  });
  guarded(Check::SignProperty, [&] {
    if (!bounds) return false;
    return sign_property_violations(conc, disp, bounds->r).empty();
  });
  return out;
}

inline VerifyReport verify_suite(const VerifyOptions& options) {
  VerifyReport report;
  report.seed = options.seed;
  std::vector<std::pair<std::size_t, std::uint64_t>> plan;
  if (options.replay_seed) {
    plan.emplace_back(0, *options.replay_seed);
  } else {
    for (std::size_t i = 0; i < options.trials; ++i) {
      plan.emplace_back(i, derive_seed(options.seed, i));
    }
  }
  report.trials = plan.size();
  for (const auto& [trial, trial_seed] : plan) {
    TrialCase tc = draw_trial(trial_seed, options.grid_points);
    if (options.gamma_override) tc.gamma = *options.gamma_override;
    const auto results = run_trial_checks(tc, options.corrupt);
    TrialFailure failure{trial, trial_seed, tc.family, tc.gamma, {}};
    for (std::size_t c = 0; c < kCheckCount; ++c) {
      auto& counts = report.counts[c];
      if (!results[c]) {
        ++counts.passed;
        ++counts.not_applicable;
      } else if (*results[c]) {
        ++counts.passed;
      } else {
        ++counts.failed;
        failure.failed_checks.push_back(static_cast<Check>(c));
      }
    }
    if (!failure.failed_checks.empty()) report.failures.push_back(std::move(failure));
  }
  return report;
}

inline std::string render_text(const VerifyReport& report) {
  std::ostringstream out;
  out << "verification suite: seed " << report.seed << ", " << report.trials << " trials\n";
  for (std::size_t c = 0; c < kCheckCount; ++c) {
    const auto& k = report.counts[c];
    out << "  " << to_string(static_cast<Check>(c)) << ": " << k.passed << "/" << report.trials
        << " pass";
    if (k.not_applicable > 0) out << " (" << k.not_applicable << " vacuous)";
    out << "\n";
  }
  if (report.failures.empty()) {
    out << "all checks passed\n";
  } else {
    out << report.failures.size() << " failing trial(s); replay with --replay <trial-seed>:\n";
    for (const auto& f : report.failures) {
      out << "  trial " << f.trial << " seed " << f.trial_seed << " " << f.family << " gamma "
          << f.gamma << ":";
      for (Check c : f.failed_checks) out << " [" << to_string(c) << "]";
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace wupd
