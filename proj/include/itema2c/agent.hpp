#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "itema2c/checkpoint.hpp"
#include "itema2c/core_types.hpp"
#include "itema2c/networks.hpp"
#include "itema2c/policy.hpp"
#include "itema2c/replay_buffer.hpp"

namespace itema2c {

enum class AgentKind { a2c, item_a2c_equal, item_a2c, item_a2c_model, slateq, ddpg, supervision, hac };

std::string_view to_string(AgentKind kind);
// Throws std::invalid_argument listing the accepted names.
AgentKind parse_agent_kind(std::string_view name);

struct AgentConfig {
  AgentKind kind = AgentKind::item_a2c_model;
  double alpha = 1.0;  // item_a2c only
  double gamma = 0.9;
  double critic_lr = 1e-3;
  double actor_lr = 1e-4;
  double weight_lr = 1e-4;
  double target_rho = 0.01;
  std::size_t batch_size = ReplayBuffer::kDefaultBatch;
  std::size_t buffer_capacity = ReplayBuffer::kDefaultCapacity;
  nn::Index user_dim = 8;
  nn::Index item_dim = 32;
  nn::Index state_dim = 32;
  nn::Index hidden = 64;
  double init_scale = 0.1;
  bool critic_decomposition = false;
  double slateq_epsilon = 0.1;
  double exploration_noise = 0.1;
  double hac_critic_coef = 1.0;
  double hac_actor_coef = 1.0;
  double hac_hyper_coef = 1.0;
  double hac_supervision_coef = 1.0;

  void validate() const;
};

struct ActResult {
  std::vector<RecList> lists;
  std::vector<std::vector<double>> log_probs;     // per list, full-pool log-softmax of each item
  std::vector<std::vector<double>> hyper_actions;  // empty unless the agent acts through a hyper-action
};

struct TrainDiagnostics {
  std::optional<double> critic_loss;
  std::optional<double> actor_loss;
  std::optional<double> weight_loss;
  // Weight-model output and reweight_strategy(alpha = 1) on the same batch;
  // filled by the model variant only.
  nn::Matrix model_weights;
  nn::Matrix strategy_weights;
};

// Catalog facts the networks need.
struct ProblemShape {
  std::size_t n_users = 1;
  std::size_t n_items = 1;
  std::size_t list_size = 1;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  virtual ActResult act(nn::ObsSpan obs, ActMode mode, Rng& rng) = 0;
  virtual TrainDiagnostics train_step(std::span<const Transition> batch) = 0;

  // Samples config.batch_size transitions; throws std::logic_error when empty.
  TrainDiagnostics train_step(ReplayBuffer& buffer);

  virtual nn::NamedStores stores() const = 0;
  // Replaces parameter values by store and parameter name. Throws
  // std::runtime_error on a missing store or a layout mismatch.
  void load_stores(const std::map<std::string, nn::ParameterStore>& loaded);

  const AgentConfig& config() const { return config_; }
  const ProblemShape& shape() const { return shape_; }

 protected:
  Agent(const AgentConfig& config, const ProblemShape& shape);
  nn::ModelDims dims() const;
  virtual nn::ParameterStore* mutable_store(const std::string& name) = 0;

  AgentConfig config_;
  ProblemShape shape_;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& config, const ProblemShape& shape, std::uint64_t seed);

}  // namespace itema2c
