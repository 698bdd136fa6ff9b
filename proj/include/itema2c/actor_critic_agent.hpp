#pragma once

#include "itema2c/agent.hpp"

namespace itema2c {

// Request-level A2C and the item-decomposed variants (equal split,
// alpha-reweighted split, learned weight model).
class ActorCriticAgent final : public Agent {
 public:
  ActorCriticAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed);

  AgentKind kind() const override { return config_.kind; }
  ActResult act(nn::ObsSpan obs, ActMode mode, Rng& rng) override;
  using Agent::train_step;
  // Critic step, soft target update, weight-model step (model variant only),
  // actor step.
  TrainDiagnostics train_step(std::span<const Transition> batch) override;
  nn::NamedStores stores() const override;

  // Individual sub-steps, in the order train_step runs them.
  double critic_step(std::span<const Transition> batch);
  void target_update();
  double weight_step(std::span<const Transition> batch);
  // `weights` overrides batch_weights(batch) when given.
  double actor_step(std::span<const Transition> batch, const nn::Matrix* weights = nullptr);

  // Future-impact shares for the batch under this variant; empty for a2c.
  nn::Matrix batch_weights(std::span<const Transition> batch) const;

  bool item_wise() const { return config_.kind != AgentKind::a2c; }
  bool has_weight_model() const { return config_.kind == AgentKind::item_a2c_model; }

  const nn::ActorNet& actor() const { return actor_; }
  const nn::ValueNet& critic() const { return critic_; }
  const nn::WeightNet& weight_model() const { return weight_; }
  nn::ParameterStore& actor_store() { return actor_store_; }
  nn::ParameterStore& critic_store() { return critic_store_; }
  nn::ParameterStore& target_store() { return target_store_; }
  nn::ParameterStore& weight_store() { return weight_store_; }

 protected:
  nn::ParameterStore* mutable_store(const std::string& name) override;

 private:
  std::vector<double> values(const nn::ParameterStore& store, const std::vector<const Observation*>& obs) const;

  nn::ActorNet actor_;
  nn::ValueNet critic_;
  nn::WeightNet weight_;
  nn::ParameterStore actor_store_;
  nn::ParameterStore critic_store_;
  nn::ParameterStore target_store_;
  nn::ParameterStore weight_store_;
};

}  // namespace itema2c
