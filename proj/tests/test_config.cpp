#include <gtest/gtest.h>

#include <algorithm>

#include "itema2c/config.hpp"

using namespace itema2c;

TEST(Config, DefaultsAreValid) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.env.list_size, 6u);
  EXPECT_EQ(c.env.max_depth, 20u);
  EXPECT_EQ(c.env.batch_users, 64u);
  EXPECT_EQ(c.training.steps, 5000u);
  EXPECT_EQ(c.training.window, 100u);
  EXPECT_EQ(c.training.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(c.agent.gamma, 0.9);
  EXPECT_EQ(c.agent.target_rho, 0.01);
  EXPECT_EQ(c.agent.critic_lr, 1e-3);
  EXPECT_EQ(c.agent.weight_lr, 1e-4);
}

TEST(Config, EmptyTextGivesDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(serialize_config(c), serialize_config(RunConfig{}));
}

TEST(Config, RoundTripIsIdentity) {
  RunConfig c;
  c.env.n_items = 321;
  c.env.drift = 0.1 + 0.2;
  c.agent.kind = AgentKind::hac;
  c.agent.alpha = 1.0 / 3.0;
  c.agent.critic_decomposition = true;
  c.training.seeds = {7, 11};
  c.output.dir = "some/where";
  c.output.checkpoint = false;
  const auto text = serialize_config(c);
  const auto back = parse_config(text);
  EXPECT_EQ(serialize_config(back), text);
  EXPECT_EQ(back.env.drift, c.env.drift);
  EXPECT_EQ(back.agent.alpha, c.agent.alpha);
  EXPECT_EQ(back.agent.kind, AgentKind::hac);
  EXPECT_EQ(back.training.seeds, c.training.seeds);
}

TEST(Config, EveryKeyRoundTripsThroughGetAndSet) {
  RunConfig c;
  for (const auto& key : config_keys()) {
    const auto value = get_config_value(c, key);
    RunConfig d;
    set_config_value(d, key, value);
    EXPECT_EQ(get_config_value(d, key), value) << key;
  }
}

TEST(Config, UnknownKeysAreListed) {
  try {
    parse_config("[env]\nn_itemz = 3\n[agent]\nalpah = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const auto& keys = e.keys();
    EXPECT_NE(std::find(keys.begin(), keys.end(), "env.n_itemz"), keys.end());
    EXPECT_NE(std::find(keys.begin(), keys.end(), "agent.alpah"), keys.end());
    EXPECT_NE(std::string(e.what()).find("env.n_itemz"), std::string::npos);
  }
  EXPECT_THROW(parse_config("[nosuch]\nx = 1\n"), ConfigError);
}

TEST(Config, BadValuesAreRejectedWithKey) {
  try {
    parse_config("[env]\nlist_size = six\n[agent]\ngamma = 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const auto& keys = e.keys();
    EXPECT_NE(std::find(keys.begin(), keys.end(), "env.list_size"), keys.end());
  }
  EXPECT_THROW(parse_config("[agent]\ngamma = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[agent]\nkind = ppo\n"), ConfigError);
  EXPECT_THROW(parse_config("[env]\nlist_size = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[training]\nseeds =\n"), ConfigError);
  EXPECT_THROW(parse_config("[env]\nn_items = -5\n"), ConfigError);
}

TEST(Config, SetRejectsUnknownKey) {
  RunConfig c;
  EXPECT_THROW(set_config_value(c, "agent.nope", "1"), ConfigError);
  EXPECT_THROW(get_config_value(c, "nope"), ConfigError);
  set_config_value(c, "training.seeds", "3, 4,5");
  EXPECT_EQ(c.training.seeds, (std::vector<std::uint64_t>{3, 4, 5}));
}

TEST(Config, LoadMissingFileThrows) {
  EXPECT_THROW(load_config_file("/nonexistent/dir/run.ini"), std::runtime_error);
}

TEST(RunId, StableAndSensitive) {
  RunConfig c;
  const std::vector<std::uint64_t> s1{1}, s2{2};
  const auto id = run_id(c, s1);
  EXPECT_EQ(id.size(), 12u);
  EXPECT_EQ(id, run_id(c, s1));
  EXPECT_NE(id, run_id(c, s2));
  c.agent.alpha = 0.5;
  EXPECT_NE(id, run_id(c, s1));
  EXPECT_EQ(hash_id(""), hash_id(""));
  EXPECT_NE(hash_id("a"), hash_id("b"));
}
