#include "itema2c/encoder.hpp"

#include <stdexcept>

namespace itema2c::nn {

StateEncoder::StateEncoder(std::string prefix, EncoderSpec spec)
    : prefix_(std::move(prefix)),
      spec_(std::move(spec)),
      user_table_(prefix_ + ".user_emb"),
      item_table_(prefix_ + ".item_emb") {
  NetworkSpec net;
  net.input = input_dim();
  net.hidden = spec_.hidden;
  net.output = spec_.state_dim;
  net.init_scale = spec_.init_scale;
  mlp_ = Mlp(prefix_ + ".mlp", net);
}

void StateEncoder::declare(ParameterStore& store, Rng& rng) const {
  init_uniform(store.add(user_table_, static_cast<Index>(spec_.n_users), spec_.user_dim).value, spec_.init_scale,
               rng);
  init_uniform(store.add(item_table_, static_cast<Index>(spec_.n_items), spec_.item_dim).value, spec_.init_scale,
               rng);
  mlp_.declare(store, rng);
}

Matrix StateEncoder::pooled_inputs(const ParameterStore& store, std::span<const Observation* const> obs) const {
  const auto& users = store.value(user_table_);
  const auto& items = store.value(item_table_);
  const Index du = spec_.user_dim;
  const Index de = spec_.item_dim;
  Matrix x = Matrix::Zero(static_cast<Index>(obs.size()), input_dim());
  for (std::size_t b = 0; b < obs.size(); ++b) {
    const Observation& o = *obs[b];
    if (o.user_id < 0 || static_cast<std::size_t>(o.user_id) >= spec_.n_users) {
      throw std::invalid_argument("unknown user id " + std::to_string(o.user_id));
    }
    const auto row = static_cast<Index>(b);
    x.block(row, 0, 1, du) = users.row(o.user_id);
    Index n_clicked = 0;
    for (const auto& h : o.history) {
      if (!is_valid(h.item, spec_.n_items)) {
        throw std::invalid_argument("unknown item id " + std::to_string(h.item.index));
      }
      x.block(row, du + de, 1, de) += items.row(h.item.index);
      if (h.clicked) {
        x.block(row, du, 1, de) += items.row(h.item.index);
        ++n_clicked;
      }
    }
    if (n_clicked > 0) x.block(row, du, 1, de) /= static_cast<double>(n_clicked);
    if (!o.history.empty()) x.block(row, du + de, 1, de) /= static_cast<double>(o.history.size());
  }
  return x;
}

Matrix StateEncoder::encode(const ParameterStore& store, std::span<const Observation* const> obs, Tape* tape) const {
  Matrix x = pooled_inputs(store, obs);
  if (tape) tape->obs.assign(obs.begin(), obs.end());
  return mlp_.forward(store, x, tape ? &tape->mlp : nullptr);
}

std::vector<double> StateEncoder::encode_one(const ParameterStore& store, const Observation& obs) const {
  const Observation* p = &obs;
  Matrix s = encode(store, std::span<const Observation* const>(&p, 1));
  return {s.data(), s.data() + s.size()};
}

void StateEncoder::backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& d_state) const {
  Matrix dx = mlp_.backward(store, sink, tape.mlp, d_state);
  if (!sink) return;
  auto& d_users = sink->grad(user_table_);
  auto& d_items = sink->grad(item_table_);
  const Index du = spec_.user_dim;
  const Index de = spec_.item_dim;
  for (std::size_t b = 0; b < tape.obs.size(); ++b) {
    const Observation& o = *tape.obs[b];
    const auto row = static_cast<Index>(b);
    d_users.row(o.user_id) += dx.block(row, 0, 1, du);
    if (o.history.empty()) continue;
    Index n_clicked = 0;
    for (const auto& h : o.history) n_clicked += h.clicked ? 1 : 0;
    const Eigen::RowVectorXd d_all = dx.block(row, du + de, 1, de) / static_cast<double>(o.history.size());
    Eigen::RowVectorXd d_clicked;
    if (n_clicked > 0) d_clicked = dx.block(row, du, 1, de) / static_cast<double>(n_clicked);
    for (const auto& h : o.history) {
      d_items.row(h.item.index) += d_all;
      if (h.clicked) d_items.row(h.item.index) += d_clicked;
    }
  }
}

}  // namespace itema2c::nn
