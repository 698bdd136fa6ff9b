#include "itema2c/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace itema2c::nn {

Parameter& ParameterStore::add(const std::string& name, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("parameter " + name + " has an empty shape");
  if (contains(name)) throw std::invalid_argument("duplicate parameter name " + name);
  Parameter p;
  p.value = Matrix::Zero(rows, cols);
  p.grad = Matrix::Zero(rows, cols);
  p.adam_m = Matrix::Zero(rows, cols);
  p.adam_v = Matrix::Zero(rows, cols);
  index_[name] = params_.size();
  names_.push_back(name);
  params_.push_back(std::move(p));
  return params_.back();
}

Parameter& ParameterStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter " + name);
  return params_[it->second];
}

const Parameter& ParameterStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter " + name);
  return params_[it->second];
}

std::size_t ParameterStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

bool ParameterStore::same_layout(const ParameterStore& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].value.rows() != other.params_[i].value.rows() ||
        params_[i].value.cols() != other.params_[i].value.cols()) {
      return false;
    }
  }
  return true;
}

void init_uniform(Matrix& m, double scale, Rng& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
}

void NetworkSpec::validate() const {
  if (input < 1 || output < 1) throw std::invalid_argument("network dims must be >= 1");
  for (auto h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden dims must be >= 1");
  }
}

Mlp::Mlp(std::string prefix, NetworkSpec spec) : prefix_(std::move(prefix)), spec_(std::move(spec)) {
  spec_.validate();
}

std::string Mlp::weight_name(std::size_t l) const { return prefix_ + ".w" + std::to_string(l); }
std::string Mlp::bias_name(std::size_t l) const { return prefix_ + ".b" + std::to_string(l); }

void Mlp::declare(ParameterStore& store, Rng& rng) const {
  Index in = spec_.input;
  for (std::size_t l = 0; l < layers(); ++l) {
    const Index out = l < spec_.hidden.size() ? spec_.hidden[l] : spec_.output;
    init_uniform(store.add(weight_name(l), in, out).value, spec_.init_scale, rng);
    store.add(bias_name(l), 1, out);
    in = out;
  }
}

namespace {

void activate(Matrix& z, Activation a) {
  switch (a) {
    case Activation::tanh:
      z = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
      break;
    case Activation::relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::identity:
      break;
  }
}

// d activation / d pre-activation expressed through the activation output.
Matrix activation_grad(const Matrix& h, Activation a) {
  switch (a) {
    case Activation::tanh:
      return (1.0 - h.array().square()).matrix();
    case Activation::relu:
      return (h.array() > 0.0).cast<double>().matrix();
    case Activation::identity:
      break;
  }
  return Matrix::Ones(h.rows(), h.cols());
}

}  // namespace

Matrix Mlp::forward(const ParameterStore& store, const Matrix& x, Tape* tape) const {
  if (x.cols() != spec_.input) {
    throw std::invalid_argument(prefix_ + ": input has " + std::to_string(x.cols()) + " columns, expected " +
                                std::to_string(spec_.input));
  }
  if (tape) {
    tape->inputs.clear();
    tape->outputs.clear();
  }
  Matrix h = x;
  for (std::size_t l = 0; l < layers(); ++l) {
    const auto& w = store.value(weight_name(l));
    const auto& b = store.value(bias_name(l));
    Matrix z = h * w;
    z.rowwise() += b.row(0);
    if (l + 1 < layers()) activate(z, spec_.activation);
    if (tape) tape->inputs.push_back(std::move(h));
    h = std::move(z);
    if (tape) tape->outputs.push_back(h);
  }
  if (tape) tape->ready = true;
  return h;
}

Matrix Mlp::backward(const ParameterStore& store, ParameterStore* sink, Tape& tape, const Matrix& dy) const {
  if (!tape.ready || tape.inputs.size() != layers()) {
    throw std::logic_error(prefix_ + ": backward called without a recorded forward pass");
  }
  tape.ready = false;
  Matrix d = dy;
  for (std::size_t l = layers(); l-- > 0;) {
    if (l + 1 < layers()) d.array() *= activation_grad(tape.outputs[l], spec_.activation).array();
    const auto& x = tape.inputs[l];
    if (sink) {
      sink->grad(weight_name(l)).noalias() += x.transpose() * d;
      sink->grad(bias_name(l)).row(0) += d.colwise().sum();
    }
    d = (d * store.value(weight_name(l)).transpose()).eval();
  }
  return d;
}

void adam_step(ParameterStore& store, double lr, const AdamHyper& hyper) {
  for (const auto& name : store.names()) {
    if (!store.at(name).grad.allFinite()) throw std::runtime_error("non-finite gradient in parameter " + name);
  }
  store.optimizer_steps += 1;
  const double t = static_cast<double>(store.optimizer_steps);
  const double bc1 = 1.0 - std::pow(hyper.beta1, t);
  const double bc2 = 1.0 - std::pow(hyper.beta2, t);
  for (const auto& name : store.names()) {
    auto& p = store.at(name);
    p.adam_m = hyper.beta1 * p.adam_m + (1.0 - hyper.beta1) * p.grad;
    p.adam_v = hyper.beta2 * p.adam_v + (1.0 - hyper.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr * (p.adam_m.array() / bc1) / ((p.adam_v.array() / bc2).sqrt() + hyper.epsilon);
    p.grad.setZero();
  }
}

void soft_update(ParameterStore& target, const ParameterStore& online, double rho) {
  if (!target.same_layout(online)) throw std::invalid_argument("soft_update: parameter layouts differ");
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("soft_update: rho must lie in [0, 1]");
  for (const auto& name : target.names()) {
    auto& t = target.value(name);
    t = (1.0 - rho) * t + rho * online.value(name);
  }
}

void copy_values(ParameterStore& target, const ParameterStore& online) {
  if (!target.same_layout(online)) throw std::invalid_argument("copy_values: parameter layouts differ");
  for (const auto& name : target.names()) target.value(name) = online.value(name);
}

}  // namespace itema2c::nn
