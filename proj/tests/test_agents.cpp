#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "itema2c/actor_critic_agent.hpp"
#include "itema2c/baseline_agents.hpp"
#include "itema2c/gradcheck_suite.hpp"
#include "itema2c/losses.hpp"

using namespace itema2c;
using nn::Matrix;
using nn::ParameterStore;
namespace L = itema2c::losses;

namespace {

AgentConfig small_agent(AgentKind kind, const SmallProblem& p) {
  AgentConfig c;
  c.kind = kind;
  c.user_dim = p.dims.user_dim;
  c.item_dim = p.dims.item_dim;
  c.state_dim = p.dims.state_dim;
  c.hidden = p.dims.hidden;
  c.init_scale = p.dims.init_scale;
  c.batch_size = p.batch.size();
  return c;
}

ProblemShape shape_of(const SmallProblem& p) { return {p.env.n_users, p.env.n_items, p.env.list_size}; }

bool stores_equal(const Agent& a, const Agent& b, double tol = 0.0) {
  const auto sa = a.stores(), sb = b.stores();
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    for (const auto& name : sa[i].second->names()) {
      const double diff = (sa[i].second->value(name) - sb[i].second->value(name)).cwiseAbs().maxCoeff();
      if (diff > tol) return false;
    }
  }
  return true;
}


std::vector<std::vector<Transition>> batches(std::size_t n, std::size_t list_size = 3) {
  std::vector<std::vector<Transition>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(make_small_problem(100 + i, 6, list_size).batch);
  return out;
}

}  // namespace

TEST(AgentKind, ParseAndPrint) {
  for (auto k : {AgentKind::a2c, AgentKind::item_a2c_equal, AgentKind::item_a2c, AgentKind::item_a2c_model,
                 AgentKind::slateq, AgentKind::ddpg, AgentKind::supervision, AgentKind::hac}) {
    EXPECT_EQ(parse_agent_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_agent_kind("ppo"), std::invalid_argument);
}

TEST(AgentConfig, Validation) {
  AgentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gamma = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = AgentConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Equivalence, AlphaZeroMatchesEqualSplitBitForBit) {
  const auto p = make_small_problem(1);
  auto equal_cfg = small_agent(AgentKind::item_a2c_equal, p);
  auto alpha_cfg = small_agent(AgentKind::item_a2c, p);
  alpha_cfg.alpha = 0.0;
  ActorCriticAgent a(equal_cfg, shape_of(p), 9), b(alpha_cfg, shape_of(p), 9);
  ASSERT_TRUE(stores_equal(a, b));
  for (const auto& batch : batches(100)) {
    a.train_step(batch);
    b.train_step(batch);
    ASSERT_TRUE(stores_equal(a, b));
  }
}

TEST(Equivalence, SingleItemListsCollapseToRequestLevel) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = make_small_problem(200 + seed, 6, 1);
    auto item_cfg = small_agent(AgentKind::item_a2c_equal, p);
    auto req_cfg = small_agent(AgentKind::a2c, p);
    ActorCriticAgent item(item_cfg, shape_of(p), seed), req(req_cfg, shape_of(p), seed);
    for (const auto& t : p.batch) {
      const std::vector<Transition> one{t};
      const auto v_now = req.critic().values(req.critic_store(), L::observations(one));
      const auto v_next = req.critic().values(req.target_store(), L::next_observations(one));
      const auto adv = L::request_advantages(one, 0.9, v_now, v_next);
      const Matrix item_adv = L::item_advantages(one, L::equal_weight_matrix(one), 0.9, v_now, v_next);
      EXPECT_NEAR(item_adv(0, 0), adv[0], 1e-9);
      EXPECT_NEAR(L::item_actor_loss(item.actor(), item.actor_store(), nullptr, one, item_adv),
                  L::request_actor_loss(req.actor(), req.actor_store(), nullptr, one, adv), 1e-9);
      EXPECT_NEAR(L::critic_item_td_loss(item.critic(), item.critic_store(), nullptr, one, L::equal_weight_matrix(one),
                                         0.9, v_next),
                  L::critic_td_loss(req.critic(), req.critic_store(), nullptr, one, L::td_targets(one, 0.9, v_next)),
                  1e-9);
    }
    // And whole training steps coincide.
    for (const auto& batch : batches(5, 1)) {
      item.train_step(batch);
      req.train_step(batch);
    }
    EXPECT_TRUE(stores_equal(item, req, 1e-9));
  }
}

TEST(Equivalence, UniformWeightModelReproducesEqualSplitUpdate) {
  const auto p = make_small_problem(2);
  auto model_cfg = small_agent(AgentKind::item_a2c_model, p);
  model_cfg.weight_lr = 0.0;
  auto equal_cfg = small_agent(AgentKind::item_a2c_equal, p);
  ActorCriticAgent model(model_cfg, shape_of(p), 4), equal(equal_cfg, shape_of(p), 4);
  model.weight_store().value("weight.head.w1").setZero();
  for (const auto& batch : batches(20)) {
    const Matrix w = model.batch_weights(batch);
    EXPECT_LT((w.array() - 1.0 / 3.0).abs().maxCoeff(), 1e-15);
    model.train_step(batch);
    equal.train_step(batch);
    for (const auto& name : equal.actor_store().names()) {
      EXPECT_LT((model.actor_store().value(name) - equal.actor_store().value(name)).cwiseAbs().maxCoeff(), 1e-9)
          << name;
    }
  }
}

TEST(Isolation, WeightStepLeavesActorAndCriticUntouched) {
  const auto p = make_small_problem(3);
  ActorCriticAgent agent(small_agent(AgentKind::item_a2c_model, p), shape_of(p), 1);
  const ParameterStore actor = agent.actor_store(), critic = agent.critic_store(), target = agent.target_store();
  const ParameterStore weight = agent.weight_store();
  agent.weight_step(p.batch);
  for (const auto& n : actor.names()) EXPECT_EQ(agent.actor_store().value(n), actor.value(n));
  for (const auto& n : critic.names()) EXPECT_EQ(agent.critic_store().value(n), critic.value(n));
  for (const auto& n : target.names()) EXPECT_EQ(agent.target_store().value(n), target.value(n));
  bool changed = false;
  for (const auto& n : weight.names()) changed = changed || agent.weight_store().value(n) != weight.value(n);
  EXPECT_TRUE(changed);
}

TEST(Isolation, CriticStepLeavesActorUntouchedAndActorStepLeavesCritic) {
  const auto p = make_small_problem(4);
  ActorCriticAgent agent(small_agent(AgentKind::item_a2c, p), shape_of(p), 1);
  const ParameterStore actor = agent.actor_store();
  agent.critic_step(p.batch);
  for (const auto& n : actor.names()) EXPECT_EQ(agent.actor_store().value(n), actor.value(n));
  const ParameterStore critic = agent.critic_store();
  agent.actor_step(p.batch);
  for (const auto& n : critic.names()) EXPECT_EQ(agent.critic_store().value(n), critic.value(n));
}

TEST(TargetNetwork, SoftUpdateAfterOneStep) {
  const auto p = make_small_problem(5);
  ActorCriticAgent agent(small_agent(AgentKind::a2c, p), shape_of(p), 1);
  const ParameterStore old_target = agent.target_store();
  agent.train_step(p.batch);
  for (const auto& n : old_target.names()) {
    const Matrix expected = 0.99 * old_target.value(n) + 0.01 * agent.critic_store().value(n);
    EXPECT_LT((agent.target_store().value(n) - expected).cwiseAbs().maxCoeff(), 1e-15) << n;
  }
}

TEST(TrainStep, DiagnosticsPerKind) {
  const auto p = make_small_problem(6);
  for (auto kind : {AgentKind::a2c, AgentKind::item_a2c_equal, AgentKind::item_a2c, AgentKind::item_a2c_model,
                    AgentKind::slateq, AgentKind::ddpg, AgentKind::supervision, AgentKind::hac}) {
    auto agent = make_agent(small_agent(kind, p), shape_of(p), 3);
    const auto d = agent->train_step(p.batch);
    const bool actor_critic = kind == AgentKind::a2c || kind == AgentKind::item_a2c_equal ||
                              kind == AgentKind::item_a2c || kind == AgentKind::item_a2c_model;
    if (actor_critic || kind == AgentKind::ddpg || kind == AgentKind::hac) {
      ASSERT_TRUE(d.critic_loss && d.actor_loss) << to_string(kind);
      EXPECT_TRUE(std::isfinite(*d.critic_loss));
      EXPECT_TRUE(std::isfinite(*d.actor_loss));
    }
    EXPECT_EQ(d.weight_loss.has_value(), kind == AgentKind::item_a2c_model || kind == AgentKind::hac)
        << to_string(kind);
    if (kind == AgentKind::item_a2c_model) {
      EXPECT_EQ(d.model_weights.rows(), static_cast<nn::Index>(p.batch.size()));
      EXPECT_EQ(d.strategy_weights.cols(), static_cast<nn::Index>(p.env.list_size));
    }
  }
}

TEST(Act, ListsAreValidForEveryKind) {
  const auto p = make_small_problem(7);
  std::vector<const Observation*> obs;
  for (const auto& t : p.batch) obs.push_back(t.obs.get());
  for (auto kind : {AgentKind::a2c, AgentKind::item_a2c_model, AgentKind::slateq, AgentKind::ddpg,
                    AgentKind::supervision, AgentKind::hac}) {
    auto agent = make_agent(small_agent(kind, p), shape_of(p), 3);
    for (auto mode : {ActMode::sample, ActMode::greedy}) {
      Rng rng(1);
      const auto r = agent->act(obs, mode, rng);
      ASSERT_EQ(r.lists.size(), obs.size());
      for (const auto& l : r.lists) {
        ASSERT_EQ(l.size(), p.env.list_size);
        std::set<int> ids;
        for (const auto& i : l) {
          EXPECT_TRUE(is_valid(i, p.env.n_items));
          ids.insert(i.index);
        }
        EXPECT_EQ(ids.size(), l.size());
      }
      const bool hyper = kind == AgentKind::ddpg || kind == AgentKind::hac;
      EXPECT_EQ(r.hyper_actions.empty(), !hyper) << to_string(kind);
    }
    Rng r1(5), r2(5);
    EXPECT_EQ(agent->act(obs, ActMode::greedy, r1).lists, agent->act(obs, ActMode::greedy, r2).lists);
  }
}

TEST(Act, DdpgWithoutNoiseIsDeterministic) {
  const auto p = make_small_problem(8);
  auto cfg = small_agent(AgentKind::ddpg, p);
  cfg.exploration_noise = 0.0;
  DdpgAgent agent(cfg, shape_of(p), 2);
  std::vector<const Observation*> obs;
  for (const auto& t : p.batch) obs.push_back(t.obs.get());
  Rng r1(1), r2(99);
  const auto a = agent.act(obs, ActMode::sample, r1), b = agent.act(obs, ActMode::sample, r2);
  EXPECT_EQ(a.lists, b.lists);
  EXPECT_EQ(a.hyper_actions, b.hyper_actions);
}

TEST(Checkpoint, AgentStoresRoundTrip) {
  const auto p = make_small_problem(9);
  for (auto kind : {AgentKind::item_a2c_model, AgentKind::slateq, AgentKind::ddpg, AgentKind::hac}) {
    auto trained = make_agent(small_agent(kind, p), shape_of(p), 3);
    trained->train_step(p.batch);
    std::stringstream ss;
    nn::save_checkpoint(ss, trained->stores());
    auto fresh = make_agent(small_agent(kind, p), shape_of(p), 77);
    EXPECT_FALSE(stores_equal(*trained, *fresh));
    fresh->load_stores(nn::load_checkpoint(ss));
    EXPECT_TRUE(stores_equal(*trained, *fresh)) << to_string(kind);
  }
  auto a2c = make_agent(small_agent(AgentKind::a2c, p), shape_of(p), 3);
  auto model = make_agent(small_agent(AgentKind::item_a2c_model, p), shape_of(p), 3);
  std::stringstream ss;
  nn::save_checkpoint(ss, a2c->stores());
  EXPECT_THROW(model->load_stores(nn::load_checkpoint(ss)), std::runtime_error);
}

TEST(ReplayTraining, TrainsFromBufferSample) {
  const auto p = make_small_problem(10);
  auto agent = make_agent(small_agent(AgentKind::a2c, p), shape_of(p), 3);
  ReplayBuffer buf(100, 1);
  for (const auto& t : p.batch) buf.push(t);
  EXPECT_NO_THROW(agent->train_step(buf));
}
