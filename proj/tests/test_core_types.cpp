#include <gtest/gtest.h>

#include "itema2c/core_types.hpp"
#include "support/fixtures.hpp"

using namespace itema2c;
using itema2c::fixtures::make_transition;

TEST(RecList, RejectsRepeatedItems) {
  EXPECT_THROW(RecList({ItemId{1}, ItemId{2}, ItemId{1}}), std::invalid_argument);
  EXPECT_THROW(RecList({ItemId{-1}}), std::invalid_argument);
  EXPECT_NO_THROW(RecList({ItemId{1}, ItemId{2}}));
}

TEST(RecList, CheckedAgainstCatalog) {
  EXPECT_THROW(RecList::checked({ItemId{0}, ItemId{5}}, 5), std::invalid_argument);
  EXPECT_EQ(RecList::checked({ItemId{0}, ItemId{4}}, 5).size(), 2u);
}

TEST(Feedback, ClickRewardMapping) {
  const std::vector<std::uint8_t> clicks{1, 0, 0, 1, 0, 0};
  const auto fb = make_feedback(clicks, 1.0, -0.2);
  const std::vector<double> expected{1.0, -0.2, -0.2, 1.0, -0.2, -0.2};
  EXPECT_EQ(fb.rewards, expected);
  EXPECT_DOUBLE_EQ(fb.total(), 2.0 - 0.8);
}

TEST(Transition, ValidateCatchesLengthMismatch) {
  auto t = make_transition({0, 1, 2, 3, 4, 5}, {1, 0, 0, 1, 0, 0});
  EXPECT_NO_THROW(validate(t));
  t.feedback.rewards.pop_back();
  EXPECT_THROW(validate(t), std::invalid_argument);
  auto u = make_transition({0, 1}, {1, 0});
  u.next_obs.reset();
  EXPECT_THROW(validate(u), std::invalid_argument);
}

TEST(Transition, SerializationRoundTripIsExact) {
  auto t = make_transition({3, 1, 7}, {0, 1, 1}, true, 42);
  t.feedback.rewards[0] = 0.1 + 0.2;
  t.hyper_action = {1.0 / 3.0, -2.5e-300};
  const auto back = deserialize_transition(serialize(t));
  EXPECT_TRUE(equivalent(t, back));
  EXPECT_EQ(serialize(back), serialize(t));
}

TEST(Transition, LogLineRoundTrip) {
  const auto t = make_transition({3, 1, 7}, {0, 1, 1}, true, 42);
  const auto line = to_log_line(t);
  const auto rec = parse_log_line(line);
  EXPECT_EQ(rec.user_id, 42);
  EXPECT_EQ(rec.items, (std::vector<ItemId>{{3}, {1}, {7}}));
  EXPECT_EQ(rec.clicks, (std::vector<std::uint8_t>{0, 1, 1}));
  EXPECT_TRUE(rec.done);
  EXPECT_THROW(parse_log_line("1 2 3"), std::invalid_argument);
}
