#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "wupd/families.hpp"
#include "wupd/random.hpp"
#include "wupd/updating.hpp"
#include "test_support.hpp"

namespace {

using wupd::Beta;
using wupd::ErrorKind;
using wupd::LikelihoodModel;
using wupd::NormalKnownVar;
using wupd::SupportGrid;
using wupd::WeightSchedule;
using wupd::testing::kind_of;

std::vector<double> coin_flips(std::uint64_t seed, std::size_t n, double theta) {
  wupd::Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = rng.bernoulli(theta) ? 1.0 : 0.0;
  return out;
}

struct BetaSetup {
  SupportGrid::Ptr grid = SupportGrid::sine_mapped(0.0, 1.0, 801);
  LikelihoodModel model = LikelihoodModel::bernoulli(grid);
};

TEST(WeightedPosterior, UnitWeightsAreBayes) {
  BetaSetup s;
  const Beta prior{2.0, 3.0};
  const auto post = wupd::weighted_posterior(wupd::to_grid(prior, s.grid), s.model, 1.0, 1.0, 1.0);
  const auto oracle = wupd::to_grid(Beta{3.0, 3.0}, s.grid);
  EXPECT_LT(wupd::sup_norm_distance(post, oracle), 1e-10);
}

TEST(WeightedPosterior, MatchesConjugateForm) {
  BetaSetup s;
  for (double alpha : {0.3, 1.0, 2.5}) {
    for (double beta : {0.3, 1.0, 2.5}) {
      const Beta prior{2.0, 4.0};
      const auto post =
          wupd::weighted_posterior(wupd::to_grid(prior, s.grid), s.model, 0.0, alpha, beta);
      const auto oracle = wupd::to_grid(wupd::weighted_beta_bernoulli(prior, 0.0, 1.0, alpha, beta), s.grid);
      EXPECT_LT(wupd::sup_norm_distance(post, oracle), 1e-9) << alpha << " " << beta;
    }
  }
}

TEST(WeightedPosterior, NormalMatchesConjugateForm) {
  const NormalKnownVar prior{0.5, 2.0};
  const auto grid = wupd::default_grid(prior, {.points = 1201});
  const auto model = LikelihoodModel::normal_known_variance(grid, 0.7);
  const auto post = wupd::weighted_posterior(wupd::to_grid(prior, grid), model, 1.3, 0.3, 2.5);
  const auto oracle = wupd::to_grid(wupd::weighted_normal_normal(0.5, 2.0, 1.3, 0.7, 0.3, 2.5), grid);
  EXPECT_LT(wupd::sup_norm_distance(post, oracle), 1e-9);
}

TEST(WeightedPosterior, RejectsNonPositiveWeights) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{2.0, 2.0}, s.grid);
  EXPECT_EQ(kind_of([&] { wupd::weighted_posterior(prior, s.model, 1.0, 0.0, 1.0); }),
            ErrorKind::NonPositiveWeight);
  EXPECT_EQ(kind_of([&] { wupd::weighted_posterior(prior, s.model, 1.0, 1.0, -0.5); }),
            ErrorKind::NonPositiveWeight);
}

TEST(WeightedPosterior, GridMismatch) {
  BetaSetup s;
  const auto other = wupd::to_grid(Beta{2.0, 2.0}, SupportGrid::sine_mapped(0.0, 1.0, 601));
  EXPECT_EQ(kind_of([&] { wupd::weighted_posterior(other, s.model, 1.0, 1.0, 1.0); }),
            ErrorKind::GridMismatch);
}

TEST(WeightedPosterior, BernoulliRejectsNonBinary) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{2.0, 2.0}, s.grid);
  EXPECT_EQ(kind_of([&] { wupd::weighted_posterior(prior, s.model, 0.5, 1.0, 1.0); }),
            ErrorKind::InvalidParameter);
}

TEST(Sequential, EmptyHistoryIsWeightedPrior) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{2.0, 3.0}, s.grid);
  const auto tr = wupd::sequential_weighted_posterior(prior, s.model, {}, WeightSchedule::constant(0.5, 1.0));
  ASSERT_EQ(tr.posteriors.size(), 1u);
  EXPECT_LT(wupd::sup_norm_distance(tr.final_posterior(), wupd::power_transform(prior, 0.5)), 1e-12);
  EXPECT_TRUE(tr.betas.empty());
}

TEST(Sequential, ConstantWeightsMatchConjugate) {
  BetaSetup s;
  const Beta prior{1.5, 2.5};
  const auto obs = coin_flips(4, 60, 0.3);
  const double successes = std::accumulate(obs.begin(), obs.end(), 0.0);
  const auto tr = wupd::sequential_weighted_posterior(wupd::to_grid(prior, s.grid), s.model, obs,
                                                      WeightSchedule::constant(0.7, 1.4));
  ASSERT_EQ(tr.posteriors.size(), obs.size() + 1);
  const auto oracle = wupd::to_grid(
      wupd::weighted_beta_bernoulli(prior, successes, 60.0 - successes, 0.7, 1.4), s.grid);
  EXPECT_LT(wupd::sup_norm_distance(tr.final_posterior(), oracle), 1e-8);
}

TEST(Sequential, PerObservationWeights) {
  BetaSetup s;
  const Beta prior{1.0, 1.0};
  const std::vector<double> obs{1.0, 0.0, 1.0};
  const std::vector<double> betas{0.5, 1.0, 2.0};
  const auto tr = wupd::sequential_weighted_posterior(wupd::to_grid(prior, s.grid), s.model, obs,
                                                      WeightSchedule::per_observation(1.0, betas));
  // theta^(0.5 + 2) (1 - theta)^1 -> Beta(3.5, 2).
  EXPECT_LT(wupd::sup_norm_distance(tr.final_posterior(), wupd::to_grid(Beta{3.5, 2.0}, s.grid)), 1e-9);
  EXPECT_EQ(tr.betas, betas);
}

TEST(Sequential, BetaListLengthMismatch) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{1.0, 1.0}, s.grid);
  const std::vector<double> obs{1.0, 0.0, 1.0};
  EXPECT_EQ(kind_of([&] {
              wupd::sequential_weighted_posterior(prior, s.model, obs,
                                                  WeightSchedule::per_observation(1.0, {1.0, 1.0}));
            }),
            ErrorKind::LengthMismatch);
}

TEST(Sequential, UnderweightedEvidenceKeepsMoreEntropy) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{1.0, 1.0}, s.grid);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto obs = coin_flips(seed, 100, 0.7);
    const auto bayes = wupd::sequential_weighted_posterior(prior, s.model, obs, WeightSchedule::constant(1.0, 1.0));
    const auto weak = wupd::sequential_weighted_posterior(prior, s.model, obs, WeightSchedule::constant(1.0, 0.2));
    EXPECT_GT(weak.entropies.back(), bayes.entropies.back());
  }
}

TEST(Sequential, HistoryDependentLikelihood) {
  // Markov chain: P(x_j = x_{j-1}) = theta; the first draw is a fair coin.
  const auto grid = SupportGrid::sine_mapped(0.0, 1.0, 401);
  LikelihoodModel markov(
      grid,
      [](double x, std::span<const double> history, double theta) {
        if (history.empty()) return std::log(0.5);
        return x == history.back() ? std::log(theta) : std::log1p(-theta);
      },
      "markov");
  const std::vector<double> obs{1, 1, 1, 0, 0, 0, 0, 1};  // 5 stays, 2 switches
  const auto tr = wupd::sequential_weighted_posterior(wupd::to_grid(Beta{1.0, 1.0}, grid), markov, obs,
                                                      WeightSchedule::constant(1.0, 1.0));
  EXPECT_LT(wupd::sup_norm_distance(tr.final_posterior(), wupd::to_grid(Beta{6.0, 3.0}, grid)), 1e-10);
}

TEST(TimeVarying, ReweightsWholeHistory) {
  BetaSetup s;
  const Beta prior{2.0, 2.0};
  const auto obs = coin_flips(8, 40, 0.6);
  auto alpha = [](std::size_t t) { return 1.0 + 0.05 * static_cast<double>(t); };
  auto beta = [](std::size_t t) { return 0.5 + 1.0 / (1.0 + static_cast<double>(t)); };
  const auto tr = wupd::time_varying_trajectory(wupd::to_grid(prior, s.grid), s.model, obs, alpha, beta);
  double successes = 0.0;
  for (std::size_t t = 0; t <= obs.size(); ++t) {
    if (t > 0) successes += obs[t - 1];
    const double n = static_cast<double>(t);
    const Beta oracle{beta(t) * successes * (t > 0) + alpha(t) * (prior.a - 1.0) + 1.0,
                      beta(t) * (n - successes) * (t > 0) + alpha(t) * (prior.b - 1.0) + 1.0};
    EXPECT_LT(wupd::sup_norm_distance(tr.posteriors[t], wupd::to_grid(oracle, s.grid)), 1e-8) << t;
    EXPECT_DOUBLE_EQ(tr.alphas[t], alpha(t));
  }
}

TEST(TimeVarying, ConstantScheduleAgreesWithSequential) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{3.0, 1.5}, s.grid);
  const auto obs = coin_flips(12, 30, 0.4);
  auto alpha = [](std::size_t) { return 0.6; };
  auto beta = [](std::size_t) { return 1.7; };
  const auto a = wupd::time_varying_trajectory(prior, s.model, obs, alpha, beta);
  const auto b = wupd::sequential_weighted_posterior(prior, s.model, obs, WeightSchedule::constant(0.6, 1.7));
  for (std::size_t t = 0; t < a.posteriors.size(); ++t) {
    EXPECT_LT(wupd::sup_norm_distance(a.posteriors[t], b.posteriors[t]), 1e-9);
  }
}

TEST(TimeVarying, SequentialRejectsMovingAlpha) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{1.0, 1.0}, s.grid);
  const std::vector<double> obs{1.0};
  const auto sched = WeightSchedule::time_varying([](std::size_t t) { return 1.0 + t; },
                                                  [](std::size_t) { return 1.0; });
  EXPECT_EQ(kind_of([&] { wupd::sequential_weighted_posterior(prior, s.model, obs, sched); }),
            ErrorKind::InvalidParameter);
}

TEST(TimeVarying, NonPositiveScheduleValue) {
  BetaSetup s;
  const auto prior = wupd::to_grid(Beta{1.0, 1.0}, s.grid);
  const std::vector<double> obs{1.0, 0.0, 1.0};
  EXPECT_EQ(kind_of([&] {
              wupd::time_varying_posterior(prior, s.model, obs, [](std::size_t) { return 1.0; },
                                           [](std::size_t t) { return 2.0 - static_cast<double>(t); });
            }),
            ErrorKind::NonPositiveWeight);
}

}  // namespace
