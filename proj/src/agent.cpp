#include "itema2c/agent.hpp"

#include <array>
#include <stdexcept>
#include <utility>

#include "itema2c/actor_critic_agent.hpp"
#include "itema2c/baseline_agents.hpp"

namespace itema2c {

namespace {

constexpr std::array<std::pair<AgentKind, std::string_view>, 8> kKindNames{{
    {AgentKind::a2c, "a2c"},
    {AgentKind::item_a2c_equal, "item_a2c_equal"},
    {AgentKind::item_a2c, "item_a2c"},
    {AgentKind::item_a2c_model, "item_a2c_model"},
    {AgentKind::slateq, "slateq"},
    {AgentKind::ddpg, "ddpg"},
    {AgentKind::supervision, "supervision"},
    {AgentKind::hac, "hac"},
}};

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

std::string_view to_string(AgentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

AgentKind parse_agent_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  std::string accepted;
  for (const auto& entry : kKindNames) accepted += (accepted.empty() ? "" : ", ") + std::string(entry.second);
  throw std::invalid_argument("agent.kind: unknown agent '" + std::string(name) + "' (expected one of " + accepted + ")");
}

void AgentConfig::validate() const {
  require(gamma >= 0.0 && gamma < 1.0, "agent.gamma: must lie in [0, 1)");
  require(critic_lr > 0.0, "agent.critic_lr: must be positive");
  require(actor_lr > 0.0, "agent.actor_lr: must be positive");
  require(weight_lr >= 0.0, "agent.weight_lr: must be nonnegative");
  require(target_rho >= 0.0 && target_rho <= 1.0, "agent.target_rho: must lie in [0, 1]");
  require(batch_size > 0, "agent.batch_size: must be positive");
  require(buffer_capacity > 0, "agent.buffer_capacity: must be positive");
  require(user_dim > 0 && item_dim > 0 && state_dim > 0 && hidden > 0, "agent.user_dim/item_dim/state_dim/hidden: must be positive");
  require(init_scale > 0.0, "agent.init_scale: must be positive");
  require(slateq_epsilon >= 0.0 && slateq_epsilon <= 1.0, "agent.slateq_epsilon: must lie in [0, 1]");
  require(exploration_noise >= 0.0, "agent.exploration_noise: must be nonnegative");
}

Agent::Agent(const AgentConfig& config, const ProblemShape& shape) : config_(config), shape_(shape) {
  config_.validate();
  if (shape.list_size == 0 || shape.list_size > shape.n_items) {
    throw std::invalid_argument("list size must lie in [1, n_items]");
  }
}

nn::ModelDims Agent::dims() const {
  nn::ModelDims d;
  d.n_users = shape_.n_users;
  d.n_items = shape_.n_items;
  d.user_dim = config_.user_dim;
  d.item_dim = config_.item_dim;
  d.state_dim = config_.state_dim;
  d.hidden = config_.hidden;
  d.init_scale = config_.init_scale;
  return d;
}

TrainDiagnostics Agent::train_step(ReplayBuffer& buffer) {
  const auto batch = buffer.sample(config_.batch_size);
  return train_step(std::span<const Transition>(batch));
}

void Agent::load_stores(const std::map<std::string, nn::ParameterStore>& loaded) {
  for (const auto& [name, _] : stores()) {
    auto it = loaded.find(name);
    if (it == loaded.end()) throw std::runtime_error("checkpoint lacks store '" + name + "'");
    nn::ParameterStore* target = mutable_store(name);
    if (!target->same_layout(it->second)) throw std::runtime_error("checkpoint store '" + name + "' has a different layout");
    nn::copy_values(*target, it->second);
  }
}

std::unique_ptr<Agent> make_agent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed) {
  switch (config.kind) {
    case AgentKind::a2c:
    case AgentKind::item_a2c_equal:
    case AgentKind::item_a2c:
    case AgentKind::item_a2c_model:
      return std::make_unique<ActorCriticAgent>(config, shape, seed);
    case AgentKind::slateq:
      return std::make_unique<SlateQAgent>(config, shape, seed);
    case AgentKind::ddpg:
      return std::make_unique<DdpgAgent>(config, shape, seed);
    case AgentKind::supervision:
      return std::make_unique<SupervisionAgent>(config, shape, seed);
    case AgentKind::hac:
      return std::make_unique<HacAgent>(config, shape, seed);
  }
  throw std::invalid_argument("unhandled agent kind");
}

}  // namespace itema2c
