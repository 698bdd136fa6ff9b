#include <gtest/gtest.h>

#include <cmath>

#include "itema2c/replay_buffer.hpp"
#include "support/fixtures.hpp"

using namespace itema2c;
using itema2c::fixtures::make_transition;

TEST(ReplayBuffer, PushGrowsAndEvictsOldest) {
  ReplayBuffer buf(2, 1);
  EXPECT_TRUE(buf.empty());
  buf.push(make_transition({0}, {1}, false, 1));
  EXPECT_EQ(buf.size(), 1u);
  buf.push(make_transition({0}, {1}, false, 2));
  buf.push(make_transition({0}, {1}, false, 3));
  EXPECT_EQ(buf.size(), 2u);
  for (std::size_t i = 0; i < buf.size(); ++i) EXPECT_NE(buf.at(i).obs->user_id, 1);
  EXPECT_EQ(buf.newest().obs->user_id, 3);
}

TEST(ReplayBuffer, RejectsMalformedTransition) {
  ReplayBuffer buf(4, 1);
  auto t = make_transition({0, 1, 2, 3, 4, 5}, {1, 0, 0, 1, 0, 0});
  t.feedback.rewards.resize(5);
  EXPECT_THROW(buf.push(t), std::invalid_argument);
  EXPECT_EQ(buf.size(), 0u);
}

TEST(ReplayBuffer, SingleEntryFillsBatch) {
  ReplayBuffer buf(4, 1);
  buf.push(make_transition({0}, {1}, false, 9));
  const auto batch = buf.sample(4);
  ASSERT_EQ(batch.size(), 4u);
  for (const auto& t : batch) EXPECT_EQ(t.obs->user_id, 9);
}

TEST(ReplayBuffer, SamplingIsSeeded) {
  auto fill = [](ReplayBuffer& b) {
    for (int u = 0; u < 50; ++u) b.push(make_transition({0}, {1}, false, u));
  };
  ReplayBuffer a(100, 5), b(100, 5);
  fill(a);
  fill(b);
  const auto sa = a.sample(16), sb = b.sample(16);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(sa[i].obs->user_id, sb[i].obs->user_id);
}

TEST(ReplayBuffer, UniformSamplingFrequency) {
  ReplayBuffer buf(10000, 3);
  for (int u = 0; u < 10000; ++u) buf.push(make_transition({0}, {1}, false, u));
  std::vector<std::size_t> counts(10000, 0);
  const std::size_t draws = 100000;
  for (std::size_t d = 0; d < draws / 128 + 1; ++d) {
    for (const auto& t : buf.sample(128)) ++counts[static_cast<std::size_t>(t.obs->user_id)];
  }
  std::size_t total = 0;
  for (auto c : counts) total += c;
  // Pearson chi-square against the uniform oracle; under uniformity it has
  // mean 9999 and standard deviation about 141.
  const double expected = static_cast<double>(total) / 10000.0;
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(std::abs(chi2 - 9999.0) / 9999.0, 0.05);
}
