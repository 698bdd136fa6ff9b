#pragma once

#include <span>
#include <string>
#include <vector>

#include "itema2c/core_types.hpp"
#include "itema2c/nn.hpp"

namespace itema2c::nn {

struct EncoderSpec {
  std::size_t n_users = 1;
  std::size_t n_items = 1;
  Index user_dim = 8;
  Index item_dim = 32;
  Index state_dim = 32;
  std::vector<Index> hidden{64};
  double init_scale = 0.1;
};

// State encoder: concat[user embedding, mean of clicked-item embeddings, mean
// of all recent item embeddings] followed by an MLP. Empty pools contribute
// zero vectors. Owns "<prefix>.user_emb", "<prefix>.item_emb" and the MLP
// "<prefix>.mlp".
class StateEncoder {
 public:
  StateEncoder() = default;
  StateEncoder(std::string prefix, EncoderSpec spec);

  struct Tape {
    Mlp::Tape mlp;
    std::vector<const Observation*> obs;
  };

  void declare(ParameterStore& store, Rng& rng) const;

  // Throws std::invalid_argument on an unknown user or item id.
  Matrix encode(const ParameterStore& store, std::span<const Observation* const> obs, Tape* tape = nullptr) const;
  std::vector<double> encode_one(const ParameterStore& store, const Observation& obs) const;

  void backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& d_state) const;

  const std::string& item_table() const { return item_table_; }
  const std::string& user_table() const { return user_table_; }
  const EncoderSpec& spec() const { return spec_; }
  Index input_dim() const { return spec_.user_dim + 2 * spec_.item_dim; }

 private:
  Matrix pooled_inputs(const ParameterStore& store, std::span<const Observation* const> obs) const;

  std::string prefix_;
  EncoderSpec spec_;
  std::string user_table_;
  std::string item_table_;
  Mlp mlp_;
};

}  // namespace itema2c::nn
