#include "itema2c/targets.hpp"

#include <stdexcept>

namespace itema2c {

double critic_target(double list_reward, double gamma, bool done, double v_next) {
  return list_reward + gamma * (done ? 0.0 : 1.0) * v_next;
}

double request_advantage(double list_reward, double gamma, bool done, double v_next, double v_now) {
  return critic_target(list_reward, gamma, done, v_next) - v_now;
}

double weighted_item_target(double item_reward, double weight, double gamma, bool done, double v_next) {
  return item_reward + weight * (gamma * (done ? 0.0 : 1.0) * v_next);
}

double item_target(double item_reward, double gamma, bool done, double v_next, std::size_t list_size) {
  if (list_size == 0) throw std::invalid_argument("list size must be >= 1");
  return weighted_item_target(item_reward, 1.0 / static_cast<double>(list_size), gamma, done, v_next);
}

WeightVector equal_weights(std::size_t list_size) {
  if (list_size == 0) throw std::invalid_argument("list size must be >= 1");
  return {std::vector<double>(list_size, 1.0 / static_cast<double>(list_size)), false};
}

WeightVector reweight_strategy(std::span<const double> credits, double alpha) {
  const std::size_t k = credits.size();
  if (k == 0) throw std::invalid_argument("cannot reweight an empty list");
  WeightVector w;
  w.values.resize(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double u = alpha * credits[i] + (1.0 - alpha);
    w.values[i] = u > 0.0 ? u : 0.0;
    total += w.values[i];
  }
  if (!(total > 0.0)) return {std::vector<double>(k, 1.0 / static_cast<double>(k)), true};
  for (double& x : w.values) x /= total;
  return w;
}

}  // namespace itema2c
