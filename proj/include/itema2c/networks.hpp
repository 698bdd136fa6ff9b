#pragma once

// Fixed architectures used by the agents. Every network owns its own state
// encoder, so gradient steps on one network never touch another.

#include <span>
#include <string>
#include <vector>

#include "itema2c/core_types.hpp"
#include "itema2c/encoder.hpp"
#include "itema2c/nn.hpp"

namespace itema2c::nn {

struct ModelDims {
  std::size_t n_users = 1;
  std::size_t n_items = 1;
  Index user_dim = 8;
  Index item_dim = 32;
  Index state_dim = 32;
  Index hidden = 64;
  double init_scale = 0.1;

  EncoderSpec encoder_spec() const;
};

using ObsSpan = std::span<const Observation* const>;

// Dot-product item selector: query(s) = head(enc(s)); score(i|s) =
// <query(s), item_emb_i>, with item_emb the encoder's item table. The same
// query doubles as the hyper-action for DDPG/HAC.
class ActorNet {
 public:
  ActorNet() = default;
  ActorNet(const std::string& prefix, const ModelDims& dims);

  struct Tape {
    StateEncoder::Tape enc;
    Mlp::Tape head;
    Matrix query;
    bool ready = false;
  };

  void declare(ParameterStore& store, Rng& rng) const;
  Matrix query(const ParameterStore& store, ObsSpan obs, Tape* tape = nullptr) const;
  Matrix scores(const ParameterStore& store, const Matrix& query) const;

  // d_scores (B x n_items) and/or d_query (B x item_dim) may be empty.
  void backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& d_scores,
                const Matrix& d_query) const;

  const std::string& item_table() const { return encoder_.item_table(); }
  const ModelDims& dims() const { return dims_; }

 private:
  ModelDims dims_;
  StateEncoder encoder_;
  Mlp head_;
};

// V(s): encoder followed by a scalar head.
class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(const std::string& prefix, const ModelDims& dims);

  struct Tape {
    StateEncoder::Tape enc;
    Mlp::Tape head;
  };

  void declare(ParameterStore& store, Rng& rng) const;
  std::vector<double> values(const ParameterStore& store, ObsSpan obs, Tape* tape = nullptr) const;
  void backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, std::span<const double> d_values) const;

 private:
  StateEncoder encoder_;
  Mlp head_;
};

// Q(s, z) for a continuous list representation z of width item_dim.
class ActionValueNet {
 public:
  ActionValueNet() = default;
  ActionValueNet(const std::string& prefix, const ModelDims& dims);

  struct Tape {
    StateEncoder::Tape enc;
    Mlp::Tape head;
  };

  void declare(ParameterStore& store, Rng& rng) const;
  std::vector<double> values(const ParameterStore& store, ObsSpan obs, const Matrix& actions, Tape* tape = nullptr) const;
  // Returns dL/d actions; parameter gradients go to *sink when non-null.
  Matrix backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, std::span<const double> d_values) const;

 private:
  ModelDims dims_;
  StateEncoder encoder_;
  Mlp head_;
};

// Per-item logits from concat[enc(s), enc(s'), item_emb, r], softmax-normalized
// across the items of each list.
class WeightNet {
 public:
  WeightNet() = default;
  WeightNet(const std::string& prefix, const ModelDims& dims);

  struct Input {
    std::vector<const Observation*> obs;
    std::vector<const Observation*> next_obs;
    std::vector<std::vector<ItemId>> items;  // B lists of K items
    Matrix rewards;                          // B x K
  };

  struct Tape {
    StateEncoder::Tape enc;
    Mlp::Tape head;
    Input input;
    bool ready = false;
  };

  void declare(ParameterStore& store, Rng& rng) const;
  Matrix logits(const ParameterStore& store, const Input& input, Tape* tape = nullptr) const;
  void backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& d_logits) const;

  // Row-wise softmax of the logits.
  static Matrix normalize(const Matrix& logits);
  // Backpropagates dL/dw through the row softmax w = normalize(logits).
  static Matrix softmax_backward(const Matrix& w, const Matrix& d_w);

 private:
  ModelDims dims_;
  StateEncoder encoder_;
  Mlp head_;
  std::string item_table_;
};

// HAC inverse module g: maps the mean item embedding of a list back to the
// hyper-action space.
class InverseNet {
 public:
  InverseNet() = default;
  InverseNet(const std::string& prefix, const ModelDims& dims);

  void declare(ParameterStore& store, Rng& rng) const;
  Matrix forward(const ParameterStore& store, const Matrix& mean_item_emb, Mlp::Tape* tape = nullptr) const;
  void backward(const ParameterStore& store, ParameterStore* sink, Mlp::Tape& tape, const Matrix& d_out) const;

 private:
  Mlp mlp_;
};

// Mean of the embeddings (rows of `table`) of each list's items.
Matrix mean_item_embedding(const Matrix& table, std::span<const std::vector<ItemId>> lists);

}  // namespace itema2c::nn
