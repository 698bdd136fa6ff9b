#pragma once

#include "itema2c/agent.hpp"

namespace itema2c {

// Item-decomposed Q-learning with a dot-product item Q-network, greedy
// next-list targets and per-slot epsilon-greedy exploration.
class SlateQAgent final : public Agent {
 public:
  SlateQAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::slateq; }
  ActResult act(nn::ObsSpan obs, ActMode mode, Rng& rng) override;
  using Agent::train_step;
  TrainDiagnostics train_step(std::span<const Transition> batch) override;
  nn::NamedStores stores() const override;

  const nn::ActorNet& q_network() const { return q_; }
  nn::ParameterStore& q_store() { return q_store_; }
  nn::ParameterStore& target_store() { return target_store_; }

 protected:
  nn::ParameterStore* mutable_store(const std::string& name) override;

 private:
  nn::ActorNet q_;
  nn::ParameterStore q_store_;
  nn::ParameterStore target_store_;
};

// Deterministic hyper-action actor with a Q(s, z) critic; the list is the
// top-K of <z, item_emb>. Exploration adds Gaussian noise to z.
class DdpgAgent final : public Agent {
 public:
  DdpgAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::ddpg; }
  ActResult act(nn::ObsSpan obs, ActMode mode, Rng& rng) override;
  using Agent::train_step;
  TrainDiagnostics train_step(std::span<const Transition> batch) override;
  nn::NamedStores stores() const override;

  nn::ParameterStore& actor_store() { return actor_store_; }
  nn::ParameterStore& critic_store() { return critic_store_; }

 protected:
  nn::ParameterStore* mutable_store(const std::string& name) override;

 private:
  nn::ActorNet actor_;
  nn::ActionValueNet critic_;
  nn::ParameterStore actor_store_;
  nn::ParameterStore actor_target_store_;
  nn::ParameterStore critic_store_;
  nn::ParameterStore critic_target_store_;
};

// Click prediction with a sigmoid over the actor score, trained by BCE.
class SupervisionAgent final : public Agent {
 public:
  SupervisionAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::supervision; }
  ActResult act(nn::ObsSpan obs, ActMode mode, Rng& rng) override;
  using Agent::train_step;
  TrainDiagnostics train_step(std::span<const Transition> batch) override;
  nn::NamedStores stores() const override;

  nn::ParameterStore& actor_store() { return actor_store_; }

 protected:
  nn::ParameterStore* mutable_store(const std::string& name) override;

 private:
  nn::ActorNet actor_;
  nn::ParameterStore actor_store_;
};

// Hyper-actor critic: Q is learned on g(list), the inverse module g maps a
// list's mean item embedding back to hyper-action space.
class HacAgent final : public Agent {
 public:
  HacAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed);

  AgentKind kind() const override { return AgentKind::hac; }
  ActResult act(nn::ObsSpan obs, ActMode mode, Rng& rng) override;
  using Agent::train_step;
  TrainDiagnostics train_step(std::span<const Transition> batch) override;
  nn::NamedStores stores() const override;

  nn::ParameterStore& actor_store() { return actor_store_; }
  nn::ParameterStore& critic_store() { return critic_store_; }
  nn::ParameterStore& inverse_store() { return inverse_store_; }

 protected:
  nn::ParameterStore* mutable_store(const std::string& name) override;

 private:
  nn::ActorNet actor_;
  nn::ActionValueNet critic_;
  nn::InverseNet inverse_;
  nn::ParameterStore actor_store_;
  nn::ParameterStore critic_store_;
  nn::ParameterStore critic_target_store_;
  nn::ParameterStore inverse_store_;
};

// Hyper-action rollout shared by DDPG and HAC: z = query(s) (+ noise when
// sampling), list = top-K of <z, item table>.
ActResult act_through_hyper_action(const nn::ActorNet& actor, const nn::ParameterStore& store, nn::ObsSpan obs,
                                   std::size_t list_size, ActMode mode, double noise, Rng& rng);

}  // namespace itema2c
