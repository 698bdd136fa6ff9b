#pragma once

// Loss functions for every agent family. Each loss is split into constants
// (TD targets, advantages, frozen log-probabilities; computed with stopped
// gradients) and a differentiable part that returns the scalar and, when a
// sink store is given, accumulates the analytic gradient into it.

#include <span>
#include <vector>

#include "itema2c/core_types.hpp"
#include "itema2c/networks.hpp"

namespace itema2c::losses {

using nn::Matrix;
using nn::ParameterStore;
using Batch = std::span<const Transition>;

// ------------------------------------------------------------ batch views

std::vector<const Observation*> observations(Batch batch);
std::vector<const Observation*> next_observations(Batch batch);
std::vector<std::vector<ItemId>> lists(Batch batch);
std::vector<double> list_rewards(Batch batch);
Matrix item_rewards(Batch batch);  // B x K
Matrix click_credits(Batch batch);  // B x K, 1 for a click else 0
Matrix hyper_actions(Batch batch);  // B x item_dim
std::size_t list_size(Batch batch);  // throws if the batch mixes list sizes

Matrix equal_weight_matrix(Batch batch);
Matrix strategy_weight_matrix(Batch batch, double alpha);

// ------------------------------------------------- request-level critic

std::vector<double> td_targets(Batch batch, double gamma, std::span<const double> v_next);

// mean_b (target_b - V(s_b))^2
double critic_td_loss(const nn::ValueNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                      std::span<const double> targets);

// Item-decomposed critic: mean_b sum_k (Psi_w(s_b, i_bk) - V(s_b)/K)^2.
double critic_item_td_loss(const nn::ValueNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                           const Matrix& weights, double gamma, std::span<const double> v_next);

// ------------------------------------------------------------ actors

std::vector<double> request_advantages(Batch batch, double gamma, std::span<const double> v_now,
                                       std::span<const double> v_next);

// A_bk = Psi_w(s_b, i_bk) - V(s_b)/K
Matrix item_advantages(Batch batch, const Matrix& weights, double gamma, std::span<const double> v_now,
                       std::span<const double> v_next);

// log pi(i_bk | s_b) over the full pool, B x K.
Matrix list_log_probs(const nn::ActorNet& net, const ParameterStore& store, Batch batch);

// sum_bk coef_bk * (-log pi(i_bk | s_b)); the shared score-function core.
double weighted_nll(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                    const Matrix& coef);

// mean_b -A_b * sum_k log pi(i_bk | s_b)
double request_actor_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                          std::span<const double> advantages);

// mean_{b,k} -A_bk * log pi(i_bk | s_b)
double item_actor_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                       const Matrix& advantages);

// ------------------------------------------------------- weight model

nn::WeightNet::Input weight_input(Batch batch);
Matrix weight_model_weights(const nn::WeightNet& net, const ParameterStore& store, Batch batch);

// Adversarial objective: mean_b sum_k A_bk(w) * log pi_bk, with w from the
// weight model and log pi, V(s), V(s') frozen.
double weight_model_loss(const nn::WeightNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                         const Matrix& log_pi, double gamma, std::span<const double> v_now,
                         std::span<const double> v_next);

// ------------------------------------------------------------- SlateQ

// Q(s, i) = <query(s), item_emb_i> using an ActorNet as the item Q-network.
Matrix item_q_values(const nn::ActorNet& net, const ParameterStore& store, Batch batch);

// r_bk + (1/K) gamma (1-d) sum_k' Q_target(s', i'_k'), where the next list is
// the greedy top-K of the online network at s'.
Matrix slateq_targets(const nn::ActorNet& net, const ParameterStore& online, const ParameterStore& target,
                      Batch batch, double gamma);

// mean_{b,k} (Q(s_b, i_bk) - y_bk)^2
double slateq_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                   const Matrix& targets);

// ----------------------------------------------------- DDPG and HAC

// R_b + gamma (1-d) Q_target(s', next_actions_b)
std::vector<double> action_value_targets(const nn::ActionValueNet& net, const ParameterStore& target, Batch batch,
                                         double gamma, const Matrix& next_actions);

// mean_b (y_b - Q(s_b, actions_b))^2
double action_value_td_loss(const nn::ActionValueNet& net, const ParameterStore& store, ParameterStore* sink,
                            Batch batch, const Matrix& actions, std::span<const double> targets);

// -mean_b Q(s_b, query(s_b)); gradient flows through the actor only.
double ddpg_actor_loss(const nn::ActorNet& actor, const ParameterStore& actor_store, ParameterStore* sink,
                       const nn::ActionValueNet& critic, const ParameterStore& critic_store, Batch batch);

// mean_{b,k} BCE(sigmoid(score(i_bk | s_b)), click_bk)
double supervision_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch);

// mean_b |Z_b - g(a_b)|^2 with Z the stored hyper-action and a_b's item
// embeddings taken (frozen) from `item_table`.
double hac_hyper_loss(const nn::InverseNet& g, const ParameterStore& store, ParameterStore* sink, Batch batch,
                      const Matrix& item_table);

// Top-K effect lists for each row of a hyper-action matrix.
std::vector<std::vector<ItemId>> effect_lists(const Matrix& hyper, const Matrix& item_table, std::size_t k);

double binary_cross_entropy_logit(double logit, double label);

}  // namespace itema2c::losses
