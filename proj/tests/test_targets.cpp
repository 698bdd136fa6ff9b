#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "itema2c/core_types.hpp"
#include "itema2c/targets.hpp"
#include "support/oracles.hpp"

using namespace itema2c;

TEST(CriticTarget, Examples) {
  EXPECT_DOUBLE_EQ(critic_target(2.0, 0.9, false, 10.0), 11.0);
  EXPECT_EQ(critic_target(2.0, 0.9, true, 10.0), 2.0);
  EXPECT_EQ(critic_target(-1.5, 0.0, false, 123.0), -1.5);
}

TEST(RequestAdvantage, Examples) {
  EXPECT_DOUBLE_EQ(request_advantage(2.0, 0.9, false, 10.0, 10.0), 1.0);
  EXPECT_EQ(request_advantage(2.0, 0.9, false, 10.0, 11.0), 0.0);
  EXPECT_EQ(request_advantage(0.0, 0.9, true, 7.0, 0.0), 0.0);
}

TEST(ItemTarget, Examples) {
  EXPECT_DOUBLE_EQ(item_target(1.0, 0.9, false, 5.0, 6), 1.75);
  EXPECT_EQ(item_target(1.0, 0.9, true, 5.0, 6), 1.0);
  EXPECT_EQ(item_target(0.7, 0.9, false, 3.0, 1), critic_target(0.7, 0.9, false, 3.0));
  EXPECT_DOUBLE_EQ(weighted_item_target(1.0, 0.5, 0.9, false, 10.0), 5.5);
  EXPECT_EQ(weighted_item_target(1.0, 1.0 / 6.0, 0.9, false, 5.0), item_target(1.0, 0.9, false, 5.0, 6));
  EXPECT_THROW(item_target(1.0, 0.9, false, 5.0, 0), std::invalid_argument);
}

TEST(ReweightStrategy, ClickSplitExamples) {
  const std::vector<double> c{1, 0, 0, 1, 0, 0};
  auto expect_values = [&](double alpha, std::vector<double> expected) {
    const auto w = reweight_strategy(c, alpha);
    ASSERT_EQ(w.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(w[k], expected[k], 1e-12) << "alpha " << alpha;
    EXPECT_FALSE(w.fallback);
  };
  expect_values(0.0, std::vector<double>(6, 1.0 / 6.0));
  expect_values(0.5, {0.25, 0.125, 0.125, 0.25, 0.125, 0.125});
  expect_values(1.0, {0.5, 0, 0, 0.5, 0, 0});
  const std::vector<double> c2{1, 1, 0};
  const auto w = reweight_strategy(c2, 0.5);
  EXPECT_NEAR(w[0], 0.4, 1e-12);
  EXPECT_NEAR(w[1], 0.4, 1e-12);
  EXPECT_NEAR(w[2], 0.2, 1e-12);
}

TEST(ReweightStrategy, NoClicksFallsBackToUniform) {
  const std::vector<double> c{0, 0, 0};
  const auto w = reweight_strategy(c, 1.0);
  EXPECT_TRUE(w.fallback);
  for (double x : w.values) EXPECT_EQ(x, 1.0 / 3.0);
  EXPECT_THROW(reweight_strategy(std::vector<double>{}, 0.5), std::invalid_argument);
}

TEST(ReweightStrategy, EqualWeightsAtAlphaZeroAreExact) {
  for (std::size_t k = 1; k <= 40; ++k) {
    std::vector<double> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = static_cast<double>(i % 2);
    EXPECT_EQ(reweight_strategy(c, 0.0).values, equal_weights(k).values);
  }
}

TEST(ReweightStrategy, PropertiesAgainstOracle) {
  Rng rng(17);
  std::uniform_int_distribution<int> len(1, 12);
  std::bernoulli_distribution click(0.3);
  for (double alpha : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0}) {
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> c(static_cast<std::size_t>(len(rng)));
      for (double& x : c) x = click(rng) ? 1.0 : 0.0;
      const auto w = reweight_strategy(c, alpha);
      bool oracle_fallback = false;
      const auto ref = oracle::reweight(c, alpha, &oracle_fallback);
      double sum = 0.0;
      bool all_nonpositive = true;
      for (std::size_t k = 0; k < c.size(); ++k) {
        EXPECT_GE(w[k], 0.0);
        EXPECT_NEAR(w[k], ref[k], 1e-12);
        sum += w[k];
        all_nonpositive = all_nonpositive && alpha * c[k] + 1.0 - alpha <= 0.0;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      EXPECT_EQ(w.fallback, all_nonpositive);
      EXPECT_EQ(w.fallback, oracle_fallback);
    }
  }
}

TEST(Reconstruction, ItemTargetsSumToRequestTarget) {
  Rng rng(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0), g(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 10);
  std::bernoulli_distribution done(0.2);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto k = static_cast<std::size_t>(len(rng));
    std::vector<double> r(k), w(k);
    for (auto& x : r) x = u(rng);
    double wsum = 0.0;
    for (auto& x : w) wsum += (x = g(rng));
    for (auto& x : w) x /= wsum;
    const double gamma = g(rng), v_next = u(rng);
    const bool d = done(rng);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += weighted_item_target(r[i], w[i], gamma, d, v_next);
    const double request = critic_target(std::accumulate(r.begin(), r.end(), 0.0), gamma, d, v_next);
    EXPECT_NEAR(total, request, 1e-9);
  }
}
