#include "itema2c/networks.hpp"

#include <stdexcept>

namespace itema2c::nn {

EncoderSpec ModelDims::encoder_spec() const {
  EncoderSpec e;
  e.n_users = n_users;
  e.n_items = n_items;
  e.user_dim = user_dim;
  e.item_dim = item_dim;
  e.state_dim = state_dim;
  e.hidden = {hidden};
  e.init_scale = init_scale;
  return e;
}

namespace {

NetworkSpec head_spec(Index in, Index hidden, Index out, double scale) {
  NetworkSpec s;
  s.input = in;
  s.hidden = {hidden};
  s.output = out;
  s.init_scale = scale;
  return s;
}

}  // namespace

// ---------------------------------------------------------------- ActorNet

ActorNet::ActorNet(const std::string& prefix, const ModelDims& dims)
    : dims_(dims),
      encoder_(prefix + ".enc", dims.encoder_spec()),
      head_(prefix + ".head", head_spec(dims.state_dim, dims.hidden, dims.item_dim, dims.init_scale)) {}

void ActorNet::declare(ParameterStore& store, Rng& rng) const {
  encoder_.declare(store, rng);
  head_.declare(store, rng);
}

Matrix ActorNet::query(const ParameterStore& store, ObsSpan obs, Tape* tape) const {
  Matrix s = encoder_.encode(store, obs, tape ? &tape->enc : nullptr);
  Matrix q = head_.forward(store, s, tape ? &tape->head : nullptr);
  if (tape) {
    tape->query = q;
    tape->ready = true;
  }
  return q;
}

Matrix ActorNet::scores(const ParameterStore& store, const Matrix& query) const {
  return query * store.value(item_table()).transpose();
}

void ActorNet::backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& d_scores,
                        const Matrix& d_query) const {
  if (!tape.ready) throw std::logic_error("ActorNet: backward called without a recorded forward pass");
  tape.ready = false;
  const auto& table = store.value(item_table());
  Matrix dq = Matrix::Zero(tape.query.rows(), tape.query.cols());
  if (d_scores.size() > 0) {
    dq.noalias() += d_scores * table;
    if (sink) sink->grad(item_table()).noalias() += d_scores.transpose() * tape.query;
  }
  if (d_query.size() > 0) dq += d_query;
  Matrix ds = head_.backward(store, sink, tape.head, dq);
  encoder_.backward(store, sink, tape.enc, ds);
}

// ---------------------------------------------------------------- ValueNet

ValueNet::ValueNet(const std::string& prefix, const ModelDims& dims)
    : encoder_(prefix + ".enc", dims.encoder_spec()),
      head_(prefix + ".head", head_spec(dims.state_dim, dims.hidden, 1, dims.init_scale)) {}

void ValueNet::declare(ParameterStore& store, Rng& rng) const {
  encoder_.declare(store, rng);
  head_.declare(store, rng);
}

std::vector<double> ValueNet::values(const ParameterStore& store, ObsSpan obs, Tape* tape) const {
  Matrix s = encoder_.encode(store, obs, tape ? &tape->enc : nullptr);
  Matrix v = head_.forward(store, s, tape ? &tape->head : nullptr);
  return {v.data(), v.data() + v.size()};
}

void ValueNet::backward(const ParameterStore& store, ParameterStore* sink, Tape& tape,
                        std::span<const double> d_values) const {
  Matrix dv(static_cast<Index>(d_values.size()), 1);
  for (std::size_t b = 0; b < d_values.size(); ++b) dv(static_cast<Index>(b), 0) = d_values[b];
  Matrix ds = head_.backward(store, sink, tape.head, dv);
  encoder_.backward(store, sink, tape.enc, ds);
}

// ---------------------------------------------------------- ActionValueNet

ActionValueNet::ActionValueNet(const std::string& prefix, const ModelDims& dims)
    : dims_(dims),
      encoder_(prefix + ".enc", dims.encoder_spec()),
      head_(prefix + ".head", head_spec(dims.state_dim + dims.item_dim, dims.hidden, 1, dims.init_scale)) {}

void ActionValueNet::declare(ParameterStore& store, Rng& rng) const {
  encoder_.declare(store, rng);
  head_.declare(store, rng);
}

std::vector<double> ActionValueNet::values(const ParameterStore& store, ObsSpan obs, const Matrix& actions,
                                           Tape* tape) const {
  if (actions.rows() != static_cast<Index>(obs.size()) || actions.cols() != dims_.item_dim) {
    throw std::invalid_argument("ActionValueNet: action matrix has the wrong shape");
  }
  Matrix s = encoder_.encode(store, obs, tape ? &tape->enc : nullptr);
  Matrix x(s.rows(), s.cols() + actions.cols());
  x << s, actions;
  Matrix q = head_.forward(store, x, tape ? &tape->head : nullptr);
  return {q.data(), q.data() + q.size()};
}

Matrix ActionValueNet::backward(const ParameterStore& store, ParameterStore* sink, Tape& tape,
                                std::span<const double> d_values) const {
  Matrix dq(static_cast<Index>(d_values.size()), 1);
  for (std::size_t b = 0; b < d_values.size(); ++b) dq(static_cast<Index>(b), 0) = d_values[b];
  Matrix dx = head_.backward(store, sink, tape.head, dq);
  Matrix ds = dx.leftCols(dims_.state_dim);
  encoder_.backward(store, sink, tape.enc, ds);
  return dx.rightCols(dims_.item_dim);
}

// ---------------------------------------------------------------- WeightNet

WeightNet::WeightNet(const std::string& prefix, const ModelDims& dims)
    : dims_(dims),
      encoder_(prefix + ".enc", dims.encoder_spec()),
      head_(prefix + ".head", head_spec(2 * dims.state_dim + dims.item_dim + 1, dims.hidden, 1, dims.init_scale)),
      item_table_(encoder_.item_table()) {}

void WeightNet::declare(ParameterStore& store, Rng& rng) const {
  encoder_.declare(store, rng);
  head_.declare(store, rng);
}

Matrix WeightNet::logits(const ParameterStore& store, const Input& input, Tape* tape) const {
  const auto batch = static_cast<Index>(input.obs.size());
  if (input.next_obs.size() != input.obs.size() || input.items.size() != input.obs.size() ||
      input.rewards.rows() != batch) {
    throw std::invalid_argument("WeightNet: inconsistent batch");
  }
  const Index k = input.rewards.cols();
  std::vector<const Observation*> all(input.obs);
  all.insert(all.end(), input.next_obs.begin(), input.next_obs.end());
  Matrix states = encoder_.encode(store, all, tape ? &tape->enc : nullptr);

  const auto& table = store.value(item_table_);
  const Index ds = dims_.state_dim;
  const Index de = dims_.item_dim;
  Matrix x(batch * k, 2 * ds + de + 1);
  for (Index b = 0; b < batch; ++b) {
    if (static_cast<Index>(input.items[static_cast<std::size_t>(b)].size()) != k) {
      throw std::invalid_argument("WeightNet: list length differs from reward width");
    }
    for (Index j = 0; j < k; ++j) {
      const Index row = b * k + j;
      x.block(row, 0, 1, ds) = states.row(b);
      x.block(row, ds, 1, ds) = states.row(batch + b);
      x.block(row, 2 * ds, 1, de) = table.row(input.items[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)].index);
      x(row, 2 * ds + de) = input.rewards(b, j);
    }
  }
  Matrix flat = head_.forward(store, x, tape ? &tape->head : nullptr);
  if (tape) {
    tape->input = input;
    tape->ready = true;
  }
  Matrix out(batch, k);
  for (Index b = 0; b < batch; ++b) {
    for (Index j = 0; j < k; ++j) out(b, j) = flat(b * k + j, 0);
  }
  return out;
}

void WeightNet::backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& d_logits) const {
  if (!tape.ready) throw std::logic_error("WeightNet: backward called without a recorded forward pass");
  tape.ready = false;
  const Index batch = d_logits.rows();
  const Index k = d_logits.cols();
  Matrix d_flat(batch * k, 1);
  for (Index b = 0; b < batch; ++b) {
    for (Index j = 0; j < k; ++j) d_flat(b * k + j, 0) = d_logits(b, j);
  }
  Matrix dx = head_.backward(store, sink, tape.head, d_flat);
  const Index ds = dims_.state_dim;
  const Index de = dims_.item_dim;
  Matrix d_states = Matrix::Zero(2 * batch, ds);
  for (Index b = 0; b < batch; ++b) {
    for (Index j = 0; j < k; ++j) {
      const Index row = b * k + j;
      d_states.row(b) += dx.block(row, 0, 1, ds);
      d_states.row(batch + b) += dx.block(row, ds, 1, ds);
      if (sink) {
        sink->grad(item_table_).row(tape.input.items[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)].index) +=
            dx.block(row, 2 * ds, 1, de);
      }
    }
  }
  encoder_.backward(store, sink, tape.enc, d_states);
}

Matrix WeightNet::normalize(const Matrix& logits) {
  Matrix w(logits.rows(), logits.cols());
  for (Index b = 0; b < logits.rows(); ++b) {
    const double m = logits.row(b).maxCoeff();
    double z = 0.0;
    for (Index j = 0; j < logits.cols(); ++j) z += w(b, j) = std::exp(logits(b, j) - m);
    w.row(b) /= z;
  }
  return w;
}

Matrix WeightNet::softmax_backward(const Matrix& w, const Matrix& d_w) {
  Matrix d(w.rows(), w.cols());
  for (Index b = 0; b < w.rows(); ++b) {
    const double inner = w.row(b).dot(d_w.row(b));
    for (Index j = 0; j < w.cols(); ++j) d(b, j) = w(b, j) * (d_w(b, j) - inner);
  }
  return d;
}

// --------------------------------------------------------------- InverseNet

InverseNet::InverseNet(const std::string& prefix, const ModelDims& dims)
    : mlp_(prefix + ".mlp", head_spec(dims.item_dim, dims.hidden, dims.item_dim, dims.init_scale)) {}

void InverseNet::declare(ParameterStore& store, Rng& rng) const { mlp_.declare(store, rng); }

Matrix InverseNet::forward(const ParameterStore& store, const Matrix& mean_item_emb, Mlp::Tape* tape) const {
  return mlp_.forward(store, mean_item_emb, tape);
}

void InverseNet::backward(const ParameterStore& store, ParameterStore* sink, Mlp::Tape& tape, const Matrix& d_out) const {
  mlp_.backward(store, sink, tape, d_out);
}

Matrix mean_item_embedding(const Matrix& table, std::span<const std::vector<ItemId>> lists) {
  Matrix out = Matrix::Zero(static_cast<Index>(lists.size()), table.cols());
  for (std::size_t b = 0; b < lists.size(); ++b) {
    if (lists[b].empty()) throw std::invalid_argument("mean_item_embedding: empty list");
    for (const auto& item : lists[b]) out.row(static_cast<Index>(b)) += table.row(item.index);
    out.row(static_cast<Index>(b)) /= static_cast<double>(lists[b].size());
  }
  return out;
}

}  // namespace itema2c::nn
