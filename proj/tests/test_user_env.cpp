#include <gtest/gtest.h>

#include <cmath>

#include "itema2c/user_env.hpp"

using namespace itema2c;

namespace {

EnvConfig small_config() {
  EnvConfig c;
  c.n_items = 50;
  c.n_users = 20;
  c.batch_users = 4;
  c.seed = 7;
  return c;
}

RecList first_items(std::size_t k, int offset = 0) {
  std::vector<ItemId> ids;
  for (std::size_t i = 0; i < k; ++i) ids.push_back(ItemId{static_cast<int>(i) + offset});
  return RecList(ids);
}

std::size_t run_to_end(UserEnvironment& env, SessionState s) {
  while (!s.done) s = env.step(s, first_items(env.config().list_size)).next;
  return s.depth;
}

}  // namespace

TEST(UserEnv, SameSeedSameLatents) {
  UserEnvironment a(small_config()), b(small_config());
  EXPECT_EQ(a.catalog().latent, b.catalog().latent);
  for (std::int64_t u = 0; u < 20; ++u) {
    auto pa = a.base_preference(u), pb = b.base_preference(u);
    EXPECT_TRUE(std::equal(pa.begin(), pa.end(), pb.begin()));
  }
  auto c = small_config();
  c.seed = 8;
  UserEnvironment other(c);
  EXPECT_NE(other.catalog().latent, a.catalog().latent);
}

TEST(UserEnv, LatentsAreUnitNorm) {
  UserEnvironment env(small_config());
  for (int i = 0; i < 50; ++i) {
    double n = 0.0;
    for (double x : env.catalog().latent_of(ItemId{i})) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
}

TEST(UserEnv, ResetServesBatchOfFreshSessions) {
  auto c = small_config();
  c.batch_users = 64;
  UserEnvironment env(c);
  const auto sessions = env.reset();
  ASSERT_EQ(sessions.size(), 64u);
  for (const auto& s : sessions) {
    EXPECT_EQ(s.patience, c.patience_init);
    EXPECT_EQ(s.depth, 0u);
    EXPECT_TRUE(s.history.empty());
    EXPECT_FALSE(s.done);
  }
  const auto again = env.reset();
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(again[i].user_id, sessions[i].user_id);
}

TEST(UserEnv, ClickProbabilityLogistic) {
  auto c = small_config();
  c.click_bias = -2.0;
  c.click_scale = 4.0;
  UserEnvironment env(c);
  const ItemId item{3};
  const auto latent = env.catalog().latent_of(item);
  SessionState aligned = env.session_for(0);
  aligned.pref.assign(latent.begin(), latent.end());
  EXPECT_NEAR(env.click_probability(aligned, item), 0.8807970779778823, 1e-12);

  // Orthogonal preference via one Gram-Schmidt step on another item's latent.
  SessionState ortho = env.session_for(0);
  const auto other = env.catalog().latent_of(ItemId{4});
  double dot = 0.0;
  for (std::size_t j = 0; j < c.dim; ++j) dot += other[j] * latent[j];
  double norm = 0.0;
  for (std::size_t j = 0; j < c.dim; ++j) {
    ortho.pref[j] = other[j] - dot * latent[j];
    norm += ortho.pref[j] * ortho.pref[j];
  }
  for (double& x : ortho.pref) x /= std::sqrt(norm);
  EXPECT_NEAR(env.click_probability(ortho, item), 0.11920292202211755, 1e-12);
}

TEST(UserEnv, ZeroScaleMakesClicksItemIndependent) {
  auto c = small_config();
  c.click_scale = 0.0;
  UserEnvironment env(c);
  const auto s = env.session_for(2);
  const double p0 = env.click_probability(s, ItemId{0});
  for (int i = 1; i < 50; ++i) EXPECT_EQ(env.click_probability(s, ItemId{i}), p0);
  EXPECT_NEAR(p0, logistic(c.click_bias), 1e-15);
}

TEST(UserEnv, AllClicksEndAtMaxDepth) {
  auto c = small_config();
  c.click_bias = 60.0;
  UserEnvironment env(c);
  EXPECT_EQ(run_to_end(env, env.session_for(0)), 20u);
}

TEST(UserEnv, NoClicksExhaustPatienceAtDepthFive) {
  auto c = small_config();
  c.click_bias = -60.0;
  UserEnvironment env(c);
  EXPECT_EQ(run_to_end(env, env.session_for(0)), 5u);
}

TEST(UserEnv, StepFeedbackAndPatience) {
  auto c = small_config();
  c.click_bias = -60.0;
  UserEnvironment env(c);
  const auto out = env.step(env.session_for(1), first_items(6));
  EXPECT_EQ(out.feedback.clicks, std::vector<std::uint8_t>(6, 0));
  EXPECT_EQ(out.feedback.rewards, std::vector<double>(6, -0.2));
  EXPECT_DOUBLE_EQ(out.next.patience, 20.0 - 4.0);
  EXPECT_EQ(out.next.depth, 1u);
  EXPECT_EQ(out.next.pref, env.session_for(1).pref);
}

TEST(UserEnv, ClicksDriftPreferenceTowardClickedItems) {
  auto c = small_config();
  c.click_bias = 60.0;
  UserEnvironment env(c);
  const auto s = env.session_for(1);
  const auto out = env.step(s, first_items(6));
  std::vector<double> expected = s.pref;
  for (int k = 0; k < 6; ++k) {
    auto l = env.catalog().latent_of(ItemId{k});
    for (std::size_t j = 0; j < c.dim; ++j) expected[j] += c.drift * l[j];
  }
  double n = 0.0;
  for (double x : expected) n += x * x;
  for (std::size_t j = 0; j < c.dim; ++j) EXPECT_NEAR(out.next.pref[j], expected[j] / std::sqrt(n), 1e-12);
}

TEST(UserEnv, HistoryAppendsAndTruncatesOldestFirst) {
  auto c = small_config();
  c.click_bias = 60.0;
  c.max_depth = 30;
  c.patience_init = 100.0;
  UserEnvironment env(c);
  auto s = env.session_for(0);
  EXPECT_TRUE(env.observation_of(s).history.empty());
  s = env.step(s, first_items(6)).next;
  EXPECT_EQ(env.observation_of(s).history.size(), 6u);
  for (int t = 1; t < 25; ++t) s = env.step(s, first_items(6, 6 * (t % 8))).next;
  const auto obs = env.observation_of(s);
  ASSERT_EQ(obs.history.size(), 120u);
  // Newest entry is the last item of step 25 (offset 6 * (24 % 8) = 0).
  EXPECT_EQ(obs.history.back().item, ItemId{5});
  EXPECT_EQ(obs.user_id, 0);
}

TEST(UserEnv, RewardBoundsPerRequest) {
  UserEnvironment env(small_config());
  auto sessions = env.reset();
  for (auto& s : sessions) {
    while (!s.done) {
      auto out = env.step(s, first_items(6, static_cast<int>(s.depth)));
      const double total = out.feedback.total();
      EXPECT_GE(total, 6 * -0.2 - 1e-12);
      EXPECT_LE(total, 6 * 1.0 + 1e-12);
      s = out.next;
    }
    EXPECT_GE(s.depth, 1u);
    EXPECT_LE(s.depth, 20u);
  }
}

TEST(UserEnv, RejectsBadActions) {
  UserEnvironment env(small_config());
  auto s = env.session_for(0);
  EXPECT_THROW(env.step(s, first_items(5)), std::invalid_argument);
  EXPECT_THROW(env.step(s, first_items(6, 45)), std::invalid_argument);
  s.done = true;
  EXPECT_THROW(env.step(s, first_items(6)), std::logic_error);
}

TEST(UserEnv, ConfigValidation) {
  auto c = small_config();
  c.list_size = 0;
  EXPECT_THROW(UserEnvironment{c}, std::invalid_argument);
  c = small_config();
  c.reward_click = -1.0;
  EXPECT_THROW(UserEnvironment{c}, std::invalid_argument);
}

TEST(UserEnv, DefaultClickModelLeavesHeadroom) {
  // A random policy clicks rarely while a policy that picks the user's best
  // items clicks most of the time.
  EnvConfig c;
  UserEnvironment env(c);
  Rng rng(3);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(c.n_items) - 1);
  double random_p = 0.0, best_p = 0.0;
  const int users = 200;
  for (int u = 0; u < users; ++u) {
    const auto s = env.session_for(u);
    random_p += env.click_probability(s, ItemId{pick(rng)});
    double best = 0.0;
    for (int i = 0; i < static_cast<int>(c.n_items); ++i) best = std::max(best, env.click_probability(s, ItemId{i}));
    best_p += best;
  }
  EXPECT_LT(random_p / users, 0.3);
  EXPECT_GT(best_p / users, 0.8);
}
