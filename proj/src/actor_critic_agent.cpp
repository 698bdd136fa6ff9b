#include "itema2c/actor_critic_agent.hpp"

#include <stdexcept>

#include "itema2c/losses.hpp"

namespace itema2c {

namespace {

void declare_copy(nn::ParameterStore& target, const nn::ParameterStore& source) {
  for (const auto& name : source.names()) {
    const auto& v = source.value(name);
    target.add(name, v.rows(), v.cols()).value = v;
  }
}

}  // namespace

ActorCriticAgent::ActorCriticAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed)
    : Agent(config, shape),
      actor_("actor", dims()),
      critic_("critic", dims()),
      weight_("weight", dims()) {
  switch (config.kind) {
    case AgentKind::a2c:
    case AgentKind::item_a2c_equal:
    case AgentKind::item_a2c:
    case AgentKind::item_a2c_model:
      break;
    default:
      throw std::invalid_argument("ActorCriticAgent: not an actor-critic agent kind");
  }
  Rng rng(seed);
  actor_.declare(actor_store_, rng);
  critic_.declare(critic_store_, rng);
  declare_copy(target_store_, critic_store_);
  if (has_weight_model()) weight_.declare(weight_store_, rng);
}

ActResult ActorCriticAgent::act(nn::ObsSpan obs, ActMode mode, Rng& rng) {
  const nn::Matrix scores = actor_.scores(actor_store_, actor_.query(actor_store_, obs));
  ActResult out;
  out.lists.reserve(obs.size());
  out.log_probs.reserve(obs.size());
  for (nn::Index b = 0; b < scores.rows(); ++b) {
    auto sel = select_list(std::span<const double>(scores.row(b).data(), static_cast<std::size_t>(scores.cols())),
                           shape_.list_size, mode, rng);
    out.lists.push_back(std::move(sel.list));
    out.log_probs.push_back(std::move(sel.log_probs));
  }
  return out;
}

std::vector<double> ActorCriticAgent::values(const nn::ParameterStore& store,
                                             const std::vector<const Observation*>& obs) const {
  return critic_.values(store, obs);
}

nn::Matrix ActorCriticAgent::batch_weights(std::span<const Transition> batch) const {
  switch (config_.kind) {
    case AgentKind::item_a2c_equal:
      return losses::equal_weight_matrix(batch);
    case AgentKind::item_a2c:
      return losses::strategy_weight_matrix(batch, config_.alpha);
    case AgentKind::item_a2c_model:
      return losses::weight_model_weights(weight_, weight_store_, batch);
    default:
      return {};
  }
}

double ActorCriticAgent::critic_step(std::span<const Transition> batch) {
  const auto v_next = values(target_store_, losses::next_observations(batch));
  critic_store_.zero_grad();
  double loss = 0.0;
  if (config_.critic_decomposition && item_wise()) {
    loss = losses::critic_item_td_loss(critic_, critic_store_, &critic_store_, batch, batch_weights(batch),
                                       config_.gamma, v_next);
  } else {
    loss = losses::critic_td_loss(critic_, critic_store_, &critic_store_, batch,
                                  losses::td_targets(batch, config_.gamma, v_next));
  }
  nn::adam_step(critic_store_, config_.critic_lr);
  return loss;
}

void ActorCriticAgent::target_update() { nn::soft_update(target_store_, critic_store_, config_.target_rho); }

double ActorCriticAgent::weight_step(std::span<const Transition> batch) {
  if (!has_weight_model()) throw std::logic_error("weight_step: agent has no weight model");
  const auto v_now = values(critic_store_, losses::observations(batch));
  const auto v_next = values(target_store_, losses::next_observations(batch));
  const nn::Matrix log_pi = losses::list_log_probs(actor_, actor_store_, batch);
  weight_store_.zero_grad();
  const double loss =
      losses::weight_model_loss(weight_, weight_store_, &weight_store_, batch, log_pi, config_.gamma, v_now, v_next);
  nn::adam_step(weight_store_, config_.weight_lr);
  return loss;
}

double ActorCriticAgent::actor_step(std::span<const Transition> batch, const nn::Matrix* weights) {
  const auto v_now = values(critic_store_, losses::observations(batch));
  const auto v_next = values(target_store_, losses::next_observations(batch));
  actor_store_.zero_grad();
  double loss = 0.0;
  if (item_wise()) {
    const nn::Matrix adv =
        losses::item_advantages(batch, weights ? *weights : batch_weights(batch), config_.gamma, v_now, v_next);
    loss = losses::item_actor_loss(actor_, actor_store_, &actor_store_, batch, adv);
  } else {
    const auto adv = losses::request_advantages(batch, config_.gamma, v_now, v_next);
    loss = losses::request_actor_loss(actor_, actor_store_, &actor_store_, batch, adv);
  }
  nn::adam_step(actor_store_, config_.actor_lr);
  return loss;
}

TrainDiagnostics ActorCriticAgent::train_step(std::span<const Transition> batch) {
  TrainDiagnostics d;
  d.critic_loss = critic_step(batch);
  target_update();
  if (has_weight_model()) {
    d.weight_loss = weight_step(batch);
    d.model_weights = batch_weights(batch);
    d.strategy_weights = losses::strategy_weight_matrix(batch, 1.0);
  }
  d.actor_loss = actor_step(batch, has_weight_model() ? &d.model_weights : nullptr);
  return d;
}

nn::NamedStores ActorCriticAgent::stores() const {
  nn::NamedStores out{{"actor", &actor_store_}, {"critic", &critic_store_}, {"critic_target", &target_store_}};
  if (has_weight_model()) out.emplace_back("weight", &weight_store_);
  return out;
}

nn::ParameterStore* ActorCriticAgent::mutable_store(const std::string& name) {
  if (name == "actor") return &actor_store_;
  if (name == "critic") return &critic_store_;
  if (name == "critic_target") return &target_store_;
  if (name == "weight" && has_weight_model()) return &weight_store_;
  throw std::invalid_argument("unknown store '" + name + "'");
}

}  // namespace itema2c
