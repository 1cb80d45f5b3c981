#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "wupd/fit.hpp"
#include "test_support.hpp"

namespace {

using wupd::Beta;
using wupd::BernoulliLikelihood;
using wupd::ErrorKind;
using wupd::FitSimulation;
using wupd::NormalKnownVar;
using wupd::NormalLikelihood;
using wupd::ReportKind;
using wupd::testing::kind_of;

TEST(ConjugatePath, BetaBernoulliSteps) {
  const std::vector<double> obs{1, 0, 1, 1};
  const wupd::ConjugatePath path(Beta{2.0, 3.0}, BernoulliLikelihood{}, obs);
  EXPECT_EQ(path.steps(), 4u);
  const auto post = std::get<Beta>(*path.posterior(4, 0.5, 2.0));
  EXPECT_DOUBLE_EQ(post.a, 2.0 * 3.0 + 0.5 * 1.0 + 1.0);
  EXPECT_DOUBLE_EQ(post.b, 2.0 * 1.0 + 0.5 * 2.0 + 1.0);
}

TEST(ConjugatePath, ImproperWeightsGiveNothing) {
  const std::vector<double> obs{1, 1};
  const wupd::ConjugatePath path(Beta{0.5, 0.5}, BernoulliLikelihood{}, obs);
  EXPECT_FALSE(path.posterior(0, 3.0, 1.0).has_value());
}

TEST(ConjugatePath, UnsupportedPair) {
  const std::vector<double> obs{1, 1};
  EXPECT_EQ(kind_of([&] { wupd::ConjugatePath(wupd::Pareto{3.0}, BernoulliLikelihood{}, obs); }),
            ErrorKind::UnsupportedModel);
  EXPECT_EQ(kind_of([&] { wupd::ConjugatePath(Beta{1.0, 1.0}, NormalLikelihood{1.0}, obs); }),
            ErrorKind::UnsupportedModel);
}

TEST(FitWeights, RecoversBayesianSubject) {
  for (std::uint64_t seed : {1, 2, 3}) {
    FitSimulation sim{.truth = 0.6, .count = 500, .alpha = 1.0, .beta = 1.0, .seed = seed};
    const auto data = wupd::simulate_fit_data(Beta{2.0, 8.0}, BernoulliLikelihood{}, sim);
    const auto fit = wupd::fit_weights(data);
    EXPECT_NEAR(fit.alpha_hat, 1.0, 0.1) << seed;
    EXPECT_NEAR(fit.beta_hat, 1.0, 0.1) << seed;
  }
}

TEST(FitWeights, RecoversWeightedSubject) {
  FitSimulation sim{.truth = 0.6, .count = 500, .alpha = 1.5, .beta = 0.7, .seed = 5};
  const auto data = wupd::simulate_fit_data(Beta{2.0, 8.0}, BernoulliLikelihood{}, sim);
  const auto fit = wupd::fit_weights(data);
  EXPECT_NEAR(fit.alpha_hat, 1.5, 0.1);
  EXPECT_NEAR(fit.beta_hat, 0.7, 0.1);
  EXPECT_FALSE(fit.grid_resolution_used.empty());
  EXPECT_GT(fit.evaluations, 41u * 41u);
}

// The Normal posterior mean depends on alpha / beta only, so point beliefs
// pin down the ratio and draws pin down both weights.
TEST(FitWeights, NormalNormalRoundTrip) {
  FitSimulation sim{.truth = 1.0, .count = 300, .alpha = 2.0, .beta = 0.5, .seed = 9};
  auto data = wupd::simulate_fit_data(NormalKnownVar{0.0, 0.25}, NormalLikelihood{1.0}, sim);
  auto fit = wupd::fit_weights(data);
  EXPECT_NEAR(fit.alpha_hat / fit.beta_hat, 4.0, 0.2);
  sim.kind = ReportKind::PosteriorDraws;
  sim.draws_per_step = 5;
  data = wupd::simulate_fit_data(NormalKnownVar{0.0, 0.25}, NormalLikelihood{1.0}, sim);
  fit = wupd::fit_weights(data);
  EXPECT_NEAR(fit.alpha_hat, 2.0, 0.4);
  EXPECT_NEAR(fit.beta_hat, 0.5, 0.1);
}

TEST(FitWeights, PosteriorDrawsRoundTrip) {
  FitSimulation sim{.truth = 0.6,
                    .count = 500,
                    .alpha = 1.5,
                    .beta = 0.7,
                    .kind = ReportKind::PosteriorDraws,
                    .draws_per_step = 5,
                    .seed = 13};
  const auto data = wupd::simulate_fit_data(Beta{2.0, 8.0}, BernoulliLikelihood{}, sim);
  const auto fit = wupd::fit_weights(data);
  EXPECT_NEAR(fit.alpha_hat, 1.5, 0.5);
  EXPECT_NEAR(fit.beta_hat, 0.7, 0.15);
}

TEST(FitWeights, EstimatesStayInsideBox) {
  FitSimulation sim{.truth = 0.6, .count = 200, .alpha = 4.0, .beta = 3.0, .seed = 21};
  const auto data = wupd::simulate_fit_data(Beta{2.0, 8.0}, BernoulliLikelihood{}, sim);
  const wupd::SearchBox box{0.5, 2.0, 0.5, 2.0};
  const auto fit = wupd::fit_weights(data, {.box = box});
  EXPECT_TRUE(box.contains(fit.alpha_hat, fit.beta_hat));
}

// Property: on Bayes-generated data with (1, 1) inside the box the estimate
// is interior, never pinned to an edge.
TEST(FitWeights, BayesDataNeverPrefersBoundary) {
  const wupd::SearchBox box{0.2, 3.0, 0.2, 3.0};
  for (std::uint64_t seed = 30; seed < 36; ++seed) {
    FitSimulation sim{.truth = 0.35, .count = 150, .seed = seed};
    const auto data = wupd::simulate_fit_data(Beta{3.0, 3.0}, BernoulliLikelihood{}, sim);
    const auto fit = wupd::fit_weights(data, {.box = box});
    EXPECT_GT(fit.alpha_hat, box.alpha_min);
    EXPECT_LT(fit.alpha_hat, box.alpha_max);
    EXPECT_GT(fit.beta_hat, box.beta_min);
    EXPECT_LT(fit.beta_hat, box.beta_max);
  }
}

TEST(FitWeights, TiesBreakTowardUnitWeights) {
  // Only the prior is reported, so beta is unidentified and every beta ties.
  wupd::FitData data{Beta{3.0, 2.0}, BernoulliLikelihood{}, {1, 0, 1}, ReportKind::PointBeliefs, {{0, 0.6}}};
  const auto fit = wupd::fit_weights(data);
  EXPECT_NEAR(fit.alpha_hat, 1.0, 1e-3);
  EXPECT_NEAR(fit.beta_hat, 1.0, 0.05);
}

TEST(FitWeights, InsufficientData) {
  wupd::FitData data{Beta{1.0, 1.0}, BernoulliLikelihood{}, {1}, ReportKind::PointBeliefs, {{1, 0.6}}};
  EXPECT_EQ(kind_of([&] { wupd::fit_weights(data); }), ErrorKind::InsufficientData);
}

TEST(FitWeights, InvalidSearchBox) {
  wupd::FitData data{Beta{1.0, 1.0}, BernoulliLikelihood{}, {1, 0}, ReportKind::PointBeliefs, {{1, 0.6}}};
  EXPECT_EQ(kind_of([&] { wupd::fit_weights(data, {.box = {0.0, 1.0, 0.1, 1.0}}); }),
            ErrorKind::SearchBoxInvalid);
  EXPECT_EQ(kind_of([&] { wupd::fit_weights(data, {.box = {2.0, 1.0, 0.1, 1.0}}); }),
            ErrorKind::SearchBoxInvalid);
}

TEST(SimulateFitData, Deterministic) {
  FitSimulation sim{.truth = 0.6, .count = 50, .alpha = 1.5, .beta = 0.7, .seed = 3};
  const auto a = wupd::simulate_fit_data(Beta{2.0, 8.0}, BernoulliLikelihood{}, sim);
  const auto b = wupd::simulate_fit_data(Beta{2.0, 8.0}, BernoulliLikelihood{}, sim);
  EXPECT_EQ(a.observations, b.observations);
  ASSERT_EQ(a.reports.size(), 51u);
  for (std::size_t i = 0; i < a.reports.size(); ++i) EXPECT_EQ(a.reports[i].value, b.reports[i].value);
}

}  // namespace
