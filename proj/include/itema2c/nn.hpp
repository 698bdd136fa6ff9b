#pragma once

// Minimal deterministic neural toolkit with hand-derived gradients: named
// parameter storage, fixed-architecture MLPs over row batches, Adam and
// Polyak target updates.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "itema2c/core_types.hpp"

namespace itema2c::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

struct Parameter {
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;
};

// Named learnable arrays with parallel gradient and optimizer-moment slots.
// Iteration order is insertion order.
class ParameterStore {
 public:
  // Throws std::invalid_argument on a duplicate name or an empty shape.
  Parameter& add(const std::string& name, Index rows, Index cols);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  Matrix& value(const std::string& name) { return at(name).value; }
  const Matrix& value(const std::string& name) const { return at(name).value; }
  Matrix& grad(const std::string& name) { return at(name).grad; }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::size_t num_scalars() const;

  void zero_grad();
  bool same_layout(const ParameterStore& other) const;

  std::int64_t optimizer_steps = 0;

 private:
  std::vector<std::string> names_;
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> index_;
};

// Uniform(-scale, scale) in declaration order.
void init_uniform(Matrix& m, double scale, Rng& rng);

enum class Activation { tanh, relu, identity };

struct NetworkSpec {
  Index input = 1;
  std::vector<Index> hidden;
  Index output = 1;
  Activation activation = Activation::tanh;
  double init_scale = 0.1;

  void validate() const;
};

// Affine + nonlinearity stack; the last layer is affine only. Parameters are
// "<prefix>.w<l>" (in x out) and "<prefix>.b<l>" (1 x out).
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::string prefix, NetworkSpec spec);

  // Recorded forward state; consumed by exactly one backward().
  struct Tape {
    std::vector<Matrix> inputs;
    std::vector<Matrix> outputs;
    bool ready = false;
  };

  void declare(ParameterStore& store, Rng& rng) const;

  Matrix forward(const ParameterStore& store, const Matrix& x, Tape* tape = nullptr) const;

  // Accumulates parameter gradients into *sink (skipped when null) and returns
  // dL/dx. Throws std::logic_error if the tape holds no unconsumed forward.
  Matrix backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& dy) const;

  const NetworkSpec& spec() const { return spec_; }
  const std::string& prefix() const { return prefix_; }
  std::size_t layers() const { return spec_.hidden.size() + 1; }

 private:
  std::string weight_name(std::size_t l) const;
  std::string bias_name(std::size_t l) const;

  std::string prefix_;
  NetworkSpec spec_;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One adaptive-moment step over every parameter; clears gradients afterwards.
// Throws std::runtime_error if any gradient is non-finite.
void adam_step(ParameterStore& store, double lr, const AdamHyper& hyper = {});

// target <- (1 - rho) * target + rho * online, elementwise.
void soft_update(ParameterStore& target, const ParameterStore& online, double rho);

// Copies values only (shapes must match).
void copy_values(ParameterStore& target, const ParameterStore& online);

}  // namespace itema2c::nn
