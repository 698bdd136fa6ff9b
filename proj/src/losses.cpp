#include "itema2c/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "itema2c/policy.hpp"
#include "itema2c/targets.hpp"

namespace itema2c::losses {

using nn::Index;

// ------------------------------------------------------------ batch views

std::vector<const Observation*> observations(Batch batch) {
  std::vector<const Observation*> out;
  out.reserve(batch.size());
  for (const auto& t : batch) out.push_back(t.obs.get());
  return out;
}

std::vector<const Observation*> next_observations(Batch batch) {
  std::vector<const Observation*> out;
  out.reserve(batch.size());
  for (const auto& t : batch) out.push_back(t.next_obs.get());
  return out;
}

std::vector<std::vector<ItemId>> lists(Batch batch) {
  std::vector<std::vector<ItemId>> out;
  out.reserve(batch.size());
  for (const auto& t : batch) out.emplace_back(t.action.begin(), t.action.end());
  return out;
}

std::vector<double> list_rewards(Batch batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& t : batch) out.push_back(t.feedback.total());
  return out;
}

std::size_t list_size(Batch batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const auto k = batch.front().list_size();
  for (const auto& t : batch) {
    if (t.list_size() != k || t.feedback.size() != k) throw std::invalid_argument("batch mixes list sizes");
  }
  return k;
}

Matrix item_rewards(Batch batch) {
  const auto k = static_cast<Index>(list_size(batch));
  Matrix r(static_cast<Index>(batch.size()), k);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (Index j = 0; j < k; ++j) r(static_cast<Index>(b), j) = batch[b].feedback.rewards[static_cast<std::size_t>(j)];
  }
  return r;
}

Matrix click_credits(Batch batch) {
  const auto k = static_cast<Index>(list_size(batch));
  Matrix c(static_cast<Index>(batch.size()), k);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (Index j = 0; j < k; ++j) {
      c(static_cast<Index>(b), j) = batch[b].feedback.clicks[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    }
  }
  return c;
}

Matrix hyper_actions(Batch batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const auto d = batch.front().hyper_action.size();
  if (d == 0) throw std::invalid_argument("batch carries no hyper-actions");
  Matrix z(static_cast<Index>(batch.size()), static_cast<Index>(d));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b].hyper_action.size() != d) throw std::invalid_argument("hyper-action width differs within batch");
    for (std::size_t j = 0; j < d; ++j) z(static_cast<Index>(b), static_cast<Index>(j)) = batch[b].hyper_action[j];
  }
  return z;
}

Matrix equal_weight_matrix(Batch batch) {
  const auto k = list_size(batch);
  const auto w = equal_weights(k);
  Matrix m(static_cast<Index>(batch.size()), static_cast<Index>(k));
  for (Index b = 0; b < m.rows(); ++b) {
    for (Index j = 0; j < m.cols(); ++j) m(b, j) = w[static_cast<std::size_t>(j)];
  }
  return m;
}

Matrix strategy_weight_matrix(Batch batch, double alpha) {
  const Matrix credits = click_credits(batch);
  Matrix m(credits.rows(), credits.cols());
  std::vector<double> row(static_cast<std::size_t>(credits.cols()));
  for (Index b = 0; b < credits.rows(); ++b) {
    for (Index j = 0; j < credits.cols(); ++j) row[static_cast<std::size_t>(j)] = credits(b, j);
    const auto w = reweight_strategy(row, alpha);
    for (Index j = 0; j < credits.cols(); ++j) m(b, j) = w[static_cast<std::size_t>(j)];
  }
  return m;
}

namespace {

void check_width(std::span<const double> v, Batch batch, const char* what) {
  if (v.size() != batch.size()) throw std::invalid_argument(std::string(what) + " does not match the batch size");
}

void check_shape(const Matrix& m, Batch batch, const char* what) {
  if (m.rows() != static_cast<Index>(batch.size()) || m.cols() != static_cast<Index>(list_size(batch))) {
    throw std::invalid_argument(std::string(what) + " must be batch x list size");
  }
}

Matrix log_softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Index b = 0; b < scores.rows(); ++b) {
    const double m = scores.row(b).maxCoeff();
    const double lse = m + std::log((scores.row(b).array() - m).exp().sum());
    out.row(b) = scores.row(b).array() - lse;
  }
  return out;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double binary_cross_entropy_logit(double logit, double label) {
  return label * softplus(-logit) + (1.0 - label) * softplus(logit);
}

// ------------------------------------------------- request-level critic

std::vector<double> td_targets(Batch batch, double gamma, std::span<const double> v_next) {
  check_width(v_next, batch, "v_next");
  std::vector<double> y(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    y[b] = critic_target(batch[b].feedback.total(), gamma, batch[b].done, v_next[b]);
  }
  return y;
}

double critic_td_loss(const nn::ValueNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                      std::span<const double> targets) {
  check_width(targets, batch, "targets");
  const auto obs = observations(batch);
  nn::ValueNet::Tape tape;
  const auto v = net.values(store, obs, sink ? &tape : nullptr);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> dv(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double e = targets[b] - v[b];
    loss += e * e / n;
    dv[b] = -2.0 * e / n;
  }
  if (sink) net.backward(store, sink, tape, dv);
  return loss;
}

double critic_item_td_loss(const nn::ValueNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                           const Matrix& weights, double gamma, std::span<const double> v_next) {
  check_shape(weights, batch, "weights");
  check_width(v_next, batch, "v_next");
  const auto k = list_size(batch);
  const double inv_k = 1.0 / static_cast<double>(k);
  const auto obs = observations(batch);
  nn::ValueNet::Tape tape;
  const auto v = net.values(store, obs, sink ? &tape : nullptr);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> dv(batch.size(), 0.0);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t j = 0; j < k; ++j) {
      const double psi = weighted_item_target(batch[b].feedback.rewards[j], weights(static_cast<Index>(b), static_cast<Index>(j)),
                                              gamma, batch[b].done, v_next[b]);
      const double e = psi - v[b] * inv_k;
      loss += e * e / n;
      dv[b] += -2.0 * e * inv_k / n;
    }
  }
  if (sink) net.backward(store, sink, tape, dv);
  return loss;
}

// ------------------------------------------------------------ actors

std::vector<double> request_advantages(Batch batch, double gamma, std::span<const double> v_now,
                                       std::span<const double> v_next) {
  check_width(v_now, batch, "v_now");
  check_width(v_next, batch, "v_next");
  std::vector<double> a(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    a[b] = request_advantage(batch[b].feedback.total(), gamma, batch[b].done, v_next[b], v_now[b]);
  }
  return a;
}

Matrix item_advantages(Batch batch, const Matrix& weights, double gamma, std::span<const double> v_now,
                       std::span<const double> v_next) {
  check_shape(weights, batch, "weights");
  check_width(v_now, batch, "v_now");
  check_width(v_next, batch, "v_next");
  const auto k = list_size(batch);
  Matrix a(weights.rows(), weights.cols());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double baseline = v_now[b] / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
      const auto bi = static_cast<Index>(b);
      const auto ji = static_cast<Index>(j);
      a(bi, ji) = weighted_item_target(batch[b].feedback.rewards[j], weights(bi, ji), gamma, batch[b].done, v_next[b]) -
                  baseline;
    }
  }
  return a;
}

Matrix list_log_probs(const nn::ActorNet& net, const ParameterStore& store, Batch batch) {
  const auto k = list_size(batch);
  const auto obs = observations(batch);
  const Matrix logp = log_softmax_rows(net.scores(store, net.query(store, obs)));
  Matrix out(static_cast<Index>(batch.size()), static_cast<Index>(k));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t j = 0; j < k; ++j) {
      out(static_cast<Index>(b), static_cast<Index>(j)) = logp(static_cast<Index>(b), batch[b].action[j].index);
    }
  }
  return out;
}

double weighted_nll(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                    const Matrix& coef) {
  check_shape(coef, batch, "coefficients");
  const auto k = list_size(batch);
  const auto obs = observations(batch);
  nn::ActorNet::Tape tape;
  const Matrix q = net.query(store, obs, sink ? &tape : nullptr);
  const Matrix logp = log_softmax_rows(net.scores(store, q));
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t j = 0; j < k; ++j) {
      loss -= coef(static_cast<Index>(b), static_cast<Index>(j)) * logp(static_cast<Index>(b), batch[b].action[j].index);
    }
  }
  if (sink) {
    // d(-log pi_i)/d score_j = pi_j - [j == i]
    Matrix d_scores = logp.array().exp().matrix();
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto bi = static_cast<Index>(b);
      d_scores.row(bi) *= coef.row(bi).sum();
      for (std::size_t j = 0; j < k; ++j) d_scores(bi, batch[b].action[j].index) -= coef(bi, static_cast<Index>(j));
    }
    net.backward(store, sink, tape, d_scores, Matrix());
  }
  return loss;
}

double request_actor_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                          std::span<const double> advantages) {
  check_width(advantages, batch, "advantages");
  const auto k = static_cast<Index>(list_size(batch));
  const double n = static_cast<double>(batch.size());
  Matrix coef(static_cast<Index>(batch.size()), k);
  for (std::size_t b = 0; b < batch.size(); ++b) coef.row(static_cast<Index>(b)).setConstant(advantages[b] / n);
  return weighted_nll(net, store, sink, batch, coef);
}

double item_actor_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                       const Matrix& advantages) {
  check_shape(advantages, batch, "advantages");
  const double scale = 1.0 / static_cast<double>(advantages.size());
  return weighted_nll(net, store, sink, batch, advantages * scale);
}

// ------------------------------------------------------- weight model

nn::WeightNet::Input weight_input(Batch batch) {
  nn::WeightNet::Input in;
  in.obs = observations(batch);
  in.next_obs = next_observations(batch);
  in.items = lists(batch);
  in.rewards = item_rewards(batch);
  return in;
}

Matrix weight_model_weights(const nn::WeightNet& net, const ParameterStore& store, Batch batch) {
  return nn::WeightNet::normalize(net.logits(store, weight_input(batch)));
}

double weight_model_loss(const nn::WeightNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                         const Matrix& log_pi, double gamma, std::span<const double> v_now,
                         std::span<const double> v_next) {
  check_shape(log_pi, batch, "log_pi");
  check_width(v_now, batch, "v_now");
  check_width(v_next, batch, "v_next");
  nn::WeightNet::Tape tape;
  const Matrix logits = net.logits(store, weight_input(batch), sink ? &tape : nullptr);
  const Matrix w = nn::WeightNet::normalize(logits);
  const Matrix adv = item_advantages(batch, w, gamma, v_now, v_next);
  const double n = static_cast<double>(batch.size());
  const double loss = adv.cwiseProduct(log_pi).sum() / n;
  if (sink) {
    Matrix d_w(w.rows(), w.cols());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const double future = gamma * (batch[b].done ? 0.0 : 1.0) * v_next[b];
      d_w.row(static_cast<Index>(b)) = log_pi.row(static_cast<Index>(b)) * (future / n);
    }
    net.backward(store, sink, tape, nn::WeightNet::softmax_backward(w, d_w));
  }
  return loss;
}

// ------------------------------------------------------------- SlateQ

Matrix item_q_values(const nn::ActorNet& net, const ParameterStore& store, Batch batch) {
  const auto k = list_size(batch);
  const Matrix q = net.query(store, observations(batch));
  const auto& table = store.value(net.item_table());
  Matrix out(static_cast<Index>(batch.size()), static_cast<Index>(k));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t j = 0; j < k; ++j) {
      out(static_cast<Index>(b), static_cast<Index>(j)) = q.row(static_cast<Index>(b)).dot(table.row(batch[b].action[j].index));
    }
  }
  return out;
}

Matrix slateq_targets(const nn::ActorNet& net, const ParameterStore& online, const ParameterStore& target,
                      Batch batch, double gamma) {
  const auto k = list_size(batch);
  const auto next = next_observations(batch);
  const Matrix online_scores = net.scores(online, net.query(online, next));
  const Matrix target_scores = net.scores(target, net.query(target, next));
  Matrix y(static_cast<Index>(batch.size()), static_cast<Index>(k));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto bi = static_cast<Index>(b);
    std::span<const double> row(online_scores.row(bi).data(), static_cast<std::size_t>(online_scores.cols()));
    double next_sum = 0.0;
    for (const auto& item : top_k(row, k)) next_sum += target_scores(bi, item.index);
    const double future = gamma * (batch[b].done ? 0.0 : 1.0) * next_sum / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) y(bi, static_cast<Index>(j)) = batch[b].feedback.rewards[j] + future;
  }
  return y;
}

double slateq_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch,
                   const Matrix& targets) {
  check_shape(targets, batch, "targets");
  const auto k = list_size(batch);
  nn::ActorNet::Tape tape;
  const Matrix q = net.query(store, observations(batch), sink ? &tape : nullptr);
  const auto& table = store.value(net.item_table());
  const double n = static_cast<double>(targets.size());
  double loss = 0.0;
  Matrix dq = Matrix::Zero(q.rows(), q.cols());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto bi = static_cast<Index>(b);
    for (std::size_t j = 0; j < k; ++j) {
      const auto item = batch[b].action[j].index;
      const double e = q.row(bi).dot(table.row(item)) - targets(bi, static_cast<Index>(j));
      loss += e * e / n;
      if (sink) {
        const double g = 2.0 * e / n;
        dq.row(bi) += g * table.row(item);
        sink->grad(net.item_table()).row(item) += g * q.row(bi);
      }
    }
  }
  if (sink) net.backward(store, sink, tape, Matrix(), dq);
  return loss;
}

// ----------------------------------------------------- DDPG and HAC

std::vector<double> action_value_targets(const nn::ActionValueNet& net, const ParameterStore& target, Batch batch,
                                         double gamma, const Matrix& next_actions) {
  const auto next = next_observations(batch);
  const auto q_next = net.values(target, next, next_actions);
  std::vector<double> y(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    y[b] = critic_target(batch[b].feedback.total(), gamma, batch[b].done, q_next[b]);
  }
  return y;
}

double action_value_td_loss(const nn::ActionValueNet& net, const ParameterStore& store, ParameterStore* sink,
                            Batch batch, const Matrix& actions, std::span<const double> targets) {
  check_width(targets, batch, "targets");
  nn::ActionValueNet::Tape tape;
  const auto q = net.values(store, observations(batch), actions, sink ? &tape : nullptr);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> dq(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double e = targets[b] - q[b];
    loss += e * e / n;
    dq[b] = -2.0 * e / n;
  }
  if (sink) net.backward(store, sink, tape, dq);
  return loss;
}

double ddpg_actor_loss(const nn::ActorNet& actor, const ParameterStore& actor_store, ParameterStore* sink,
                       const nn::ActionValueNet& critic, const ParameterStore& critic_store, Batch batch) {
  const auto obs = observations(batch);
  nn::ActorNet::Tape actor_tape;
  const Matrix z = actor.query(actor_store, obs, sink ? &actor_tape : nullptr);
  nn::ActionValueNet::Tape critic_tape;
  const auto q = critic.values(critic_store, obs, z, sink ? &critic_tape : nullptr);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  for (double v : q) loss -= v / n;
  if (sink) {
    std::vector<double> dq(batch.size(), -1.0 / n);
    const Matrix dz = critic.backward(critic_store, nullptr, critic_tape, dq);
    actor.backward(actor_store, sink, actor_tape, Matrix(), dz);
  }
  return loss;
}

double supervision_loss(const nn::ActorNet& net, const ParameterStore& store, ParameterStore* sink, Batch batch) {
  const auto k = list_size(batch);
  nn::ActorNet::Tape tape;
  const Matrix q = net.query(store, observations(batch), sink ? &tape : nullptr);
  const auto& table = store.value(net.item_table());
  const double n = static_cast<double>(batch.size() * k);
  double loss = 0.0;
  Matrix dq = Matrix::Zero(q.rows(), q.cols());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto bi = static_cast<Index>(b);
    for (std::size_t j = 0; j < k; ++j) {
      const auto item = batch[b].action[j].index;
      const double x = q.row(bi).dot(table.row(item));
      const double y = batch[b].feedback.clicks[j] ? 1.0 : 0.0;
      loss += binary_cross_entropy_logit(x, y) / n;
      if (sink) {
        const double g = (sigmoid(x) - y) / n;
        dq.row(bi) += g * table.row(item);
        sink->grad(net.item_table()).row(item) += g * q.row(bi);
      }
    }
  }
  if (sink) net.backward(store, sink, tape, Matrix(), dq);
  return loss;
}

double hac_hyper_loss(const nn::InverseNet& g, const ParameterStore& store, ParameterStore* sink, Batch batch,
                      const Matrix& item_table) {
  const Matrix z = hyper_actions(batch);
  const auto ls = lists(batch);
  nn::Mlp::Tape tape;
  const Matrix out = g.forward(store, nn::mean_item_embedding(item_table, ls), sink ? &tape : nullptr);
  if (out.cols() != z.cols()) throw std::invalid_argument("hyper-action width does not match the inverse module");
  const Matrix diff = z - out;
  const double n = static_cast<double>(batch.size());
  if (sink) g.backward(store, sink, tape, diff * (-2.0 / n));
  return diff.squaredNorm() / n;
}

std::vector<std::vector<ItemId>> effect_lists(const Matrix& hyper, const Matrix& item_table, std::size_t k) {
  const Matrix scores = hyper * item_table.transpose();
  std::vector<std::vector<ItemId>> out;
  out.reserve(static_cast<std::size_t>(scores.rows()));
  for (Index b = 0; b < scores.rows(); ++b) {
    out.push_back(top_k(std::span<const double>(scores.row(b).data(), static_cast<std::size_t>(scores.cols())), k));
  }
  return out;
}

}  // namespace itema2c::losses
