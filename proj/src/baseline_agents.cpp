#include "itema2c/baseline_agents.hpp"

#include <algorithm>
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

void scale_grads(nn::ParameterStore& store, double c) {
  for (const auto& name : store.names()) store.grad(name) *= c;
}

std::span<const double> row_span(const nn::Matrix& m, nn::Index r) {
  return {m.row(r).data(), static_cast<std::size_t>(m.cols())};
}

void fill_log_probs(ActResult& out, const nn::Matrix& scores) {
  for (std::size_t b = 0; b < out.lists.size(); ++b) {
    const auto logp = log_softmax(row_span(scores, static_cast<nn::Index>(b)));
    std::vector<double> lp;
    for (const auto& item : out.lists[b]) lp.push_back(logp[static_cast<std::size_t>(item.index)]);
    out.log_probs.push_back(std::move(lp));
  }
}

}  // namespace

ActResult act_through_hyper_action(const nn::ActorNet& actor, const nn::ParameterStore& store, nn::ObsSpan obs,
                                   std::size_t list_size, ActMode mode, double noise, Rng& rng) {
  nn::Matrix z = actor.query(store, obs);
  if (mode == ActMode::sample && noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise);
    for (nn::Index i = 0; i < z.size(); ++i) z.data()[i] += gauss(rng);
  }
  const nn::Matrix scores = actor.scores(store, z);
  ActResult out;
  for (nn::Index b = 0; b < z.rows(); ++b) {
    out.lists.emplace_back(top_k(row_span(scores, b), list_size));
    out.hyper_actions.emplace_back(z.row(b).data(), z.row(b).data() + z.cols());
  }
  fill_log_probs(out, scores);
  return out;
}

// ------------------------------------------------------------------ SlateQ

SlateQAgent::SlateQAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed)
    : Agent(config, shape), q_("q", dims()) {
  Rng rng(seed);
  q_.declare(q_store_, rng);
  declare_copy(target_store_, q_store_);
}

ActResult SlateQAgent::act(nn::ObsSpan obs, ActMode mode, Rng& rng) {
  const nn::Matrix scores = q_.scores(q_store_, q_.query(q_store_, obs));
  const std::size_t k = shape_.list_size;
  const std::size_t pool = std::min(shape_.n_items, 2 * k);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> any_item(0, static_cast<std::int32_t>(shape_.n_items) - 1);
  ActResult out;
  for (nn::Index b = 0; b < scores.rows(); ++b) {
    const auto ranked = top_k(row_span(scores, b), mode == ActMode::greedy ? k : pool);
    std::vector<ItemId> list;
    std::size_t next_best = 0;
    auto taken = [&](ItemId id) { return std::find(list.begin(), list.end(), id) != list.end(); };
    for (std::size_t slot = 0; slot < k; ++slot) {
      if (mode == ActMode::sample && unif(rng) < config_.slateq_epsilon) {
        ItemId pick{any_item(rng)};
        while (taken(pick)) pick = ItemId{any_item(rng)};
        list.push_back(pick);
      } else {
        while (taken(ranked[next_best])) ++next_best;
        list.push_back(ranked[next_best++]);
      }
    }
    out.lists.emplace_back(std::move(list));
  }
  fill_log_probs(out, scores);
  return out;
}

TrainDiagnostics SlateQAgent::train_step(std::span<const Transition> batch) {
  TrainDiagnostics d;
  const nn::Matrix y = losses::slateq_targets(q_, q_store_, target_store_, batch, config_.gamma);
  q_store_.zero_grad();
  d.critic_loss = losses::slateq_loss(q_, q_store_, &q_store_, batch, y);
  nn::adam_step(q_store_, config_.critic_lr);
  nn::soft_update(target_store_, q_store_, config_.target_rho);
  return d;
}

nn::NamedStores SlateQAgent::stores() const { return {{"q", &q_store_}, {"q_target", &target_store_}}; }

nn::ParameterStore* SlateQAgent::mutable_store(const std::string& name) {
  if (name == "q") return &q_store_;
  if (name == "q_target") return &target_store_;
  throw std::invalid_argument("unknown store '" + name + "'");
}

// -------------------------------------------------------------------- DDPG

DdpgAgent::DdpgAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed)
    : Agent(config, shape), actor_("actor", dims()), critic_("critic", dims()) {
  Rng rng(seed);
  actor_.declare(actor_store_, rng);
  critic_.declare(critic_store_, rng);
  declare_copy(actor_target_store_, actor_store_);
  declare_copy(critic_target_store_, critic_store_);
}

ActResult DdpgAgent::act(nn::ObsSpan obs, ActMode mode, Rng& rng) {
  return act_through_hyper_action(actor_, actor_store_, obs, shape_.list_size, mode, config_.exploration_noise, rng);
}

TrainDiagnostics DdpgAgent::train_step(std::span<const Transition> batch) {
  TrainDiagnostics d;
  const nn::Matrix next_z = actor_.query(actor_target_store_, losses::next_observations(batch));
  const auto y = losses::action_value_targets(critic_, critic_target_store_, batch, config_.gamma, next_z);
  critic_store_.zero_grad();
  d.critic_loss = losses::action_value_td_loss(critic_, critic_store_, &critic_store_, batch,
                                               losses::hyper_actions(batch), y);
  nn::adam_step(critic_store_, config_.critic_lr);

  actor_store_.zero_grad();
  d.actor_loss = losses::ddpg_actor_loss(actor_, actor_store_, &actor_store_, critic_, critic_store_, batch);
  nn::adam_step(actor_store_, config_.actor_lr);

  nn::soft_update(critic_target_store_, critic_store_, config_.target_rho);
  nn::soft_update(actor_target_store_, actor_store_, config_.target_rho);
  return d;
}

nn::NamedStores DdpgAgent::stores() const {
  return {{"actor", &actor_store_},
          {"actor_target", &actor_target_store_},
          {"critic", &critic_store_},
          {"critic_target", &critic_target_store_}};
}

nn::ParameterStore* DdpgAgent::mutable_store(const std::string& name) {
  if (name == "actor") return &actor_store_;
  if (name == "actor_target") return &actor_target_store_;
  if (name == "critic") return &critic_store_;
  if (name == "critic_target") return &critic_target_store_;
  throw std::invalid_argument("unknown store '" + name + "'");
}

// ------------------------------------------------------------- Supervision

SupervisionAgent::SupervisionAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed)
    : Agent(config, shape), actor_("actor", dims()) {
  Rng rng(seed);
  actor_.declare(actor_store_, rng);
}

ActResult SupervisionAgent::act(nn::ObsSpan obs, ActMode mode, Rng& rng) {
  const nn::Matrix scores = actor_.scores(actor_store_, actor_.query(actor_store_, obs));
  ActResult out;
  for (nn::Index b = 0; b < scores.rows(); ++b) {
    auto sel = select_list(row_span(scores, b), shape_.list_size, mode, rng);
    out.lists.push_back(std::move(sel.list));
    out.log_probs.push_back(std::move(sel.log_probs));
  }
  return out;
}

TrainDiagnostics SupervisionAgent::train_step(std::span<const Transition> batch) {
  TrainDiagnostics d;
  actor_store_.zero_grad();
  d.actor_loss = losses::supervision_loss(actor_, actor_store_, &actor_store_, batch);
  nn::adam_step(actor_store_, config_.actor_lr);
  return d;
}

nn::NamedStores SupervisionAgent::stores() const { return {{"actor", &actor_store_}}; }

nn::ParameterStore* SupervisionAgent::mutable_store(const std::string& name) {
  if (name == "actor") return &actor_store_;
  throw std::invalid_argument("unknown store '" + name + "'");
}

// --------------------------------------------------------------------- HAC

HacAgent::HacAgent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed)
    : Agent(config, shape), actor_("actor", dims()), critic_("critic", dims()), inverse_("inverse", dims()) {
  Rng rng(seed);
  actor_.declare(actor_store_, rng);
  critic_.declare(critic_store_, rng);
  inverse_.declare(inverse_store_, rng);
  declare_copy(critic_target_store_, critic_store_);
}

ActResult HacAgent::act(nn::ObsSpan obs, ActMode mode, Rng& rng) {
  return act_through_hyper_action(actor_, actor_store_, obs, shape_.list_size, mode, config_.exploration_noise, rng);
}

TrainDiagnostics HacAgent::train_step(std::span<const Transition> batch) {
  TrainDiagnostics d;
  const std::size_t k = losses::list_size(batch);
  const nn::Matrix table = actor_store_.value(actor_.item_table());
  const auto lists = losses::lists(batch);
  const nn::Matrix action_repr = inverse_.forward(inverse_store_, nn::mean_item_embedding(table, lists));

  const nn::Matrix next_z = actor_.query(actor_store_, losses::next_observations(batch));
  const auto next_lists = losses::effect_lists(next_z, table, k);
  const nn::Matrix next_repr = inverse_.forward(inverse_store_, nn::mean_item_embedding(table, next_lists));
  const auto y = losses::action_value_targets(critic_, critic_target_store_, batch, config_.gamma, next_repr);

  critic_store_.zero_grad();
  d.critic_loss = config_.hac_critic_coef *
                  losses::action_value_td_loss(critic_, critic_store_, &critic_store_, batch, action_repr, y);
  scale_grads(critic_store_, config_.hac_critic_coef);
  nn::adam_step(critic_store_, config_.critic_lr);
  nn::soft_update(critic_target_store_, critic_store_, config_.target_rho);

  const auto q_now = critic_.values(critic_store_, losses::observations(batch), action_repr);
  std::vector<double> adv(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) adv[b] = config_.hac_actor_coef * (y[b] - q_now[b]);

  actor_store_.zero_grad();
  double actor_loss = config_.hac_supervision_coef * losses::supervision_loss(actor_, actor_store_, &actor_store_, batch);
  scale_grads(actor_store_, config_.hac_supervision_coef);
  actor_loss += losses::request_actor_loss(actor_, actor_store_, &actor_store_, batch, adv);
  nn::adam_step(actor_store_, config_.actor_lr);
  d.actor_loss = actor_loss;

  inverse_store_.zero_grad();
  d.weight_loss = config_.hac_hyper_coef * losses::hac_hyper_loss(inverse_, inverse_store_, &inverse_store_, batch, table);
  scale_grads(inverse_store_, config_.hac_hyper_coef);
  nn::adam_step(inverse_store_, config_.critic_lr);
  return d;
}

nn::NamedStores HacAgent::stores() const {
  return {{"actor", &actor_store_},
          {"critic", &critic_store_},
          {"critic_target", &critic_target_store_},
          {"inverse", &inverse_store_}};
}

nn::ParameterStore* HacAgent::mutable_store(const std::string& name) {
  if (name == "actor") return &actor_store_;
  if (name == "critic") return &critic_store_;
  if (name == "critic_target") return &critic_target_store_;
  if (name == "inverse") return &inverse_store_;
  throw std::invalid_argument("unknown store '" + name + "'");
}

}  // namespace itema2c
