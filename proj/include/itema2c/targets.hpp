#pragma once

// Scalar TD targets, advantages and future-impact weights for the
// request-level and item-decomposed actor-critic objectives.

#include <cstddef>
#include <span>
#include <vector>

namespace itema2c {

// R + gamma * (1 - d) * v_next
double critic_target(double list_reward, double gamma, bool done, double v_next);

// critic_target(...) - v_now
double request_advantage(double list_reward, double gamma, bool done, double v_next, double v_now);

// r + w * (gamma * (1 - d) * v_next)
double weighted_item_target(double item_reward, double weight, double gamma, bool done, double v_next);

// Equal split of the future impact: weighted_item_target with w = 1/K.
double item_target(double item_reward, double gamma, bool done, double v_next, std::size_t list_size);

// Future-impact shares for the items of one list. Entries are >= 0 and sum to 1.
struct WeightVector {
  std::vector<double> values;
  // True when every unnormalized weight was <= 0 and the uniform split was used.
  bool fallback = false;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
};

WeightVector equal_weights(std::size_t list_size);

// Reward-based reweighting: u_k = alpha * c_k + (1 - alpha), clamped at zero
// and normalized to sum one (which equals dividing by alpha * sum(c) +
// (1 - alpha) * K whenever nothing is clamped). alpha = 0 gives the equal
// split, alpha = 1 gives c_k / sum(c). Throws std::invalid_argument for K = 0.
WeightVector reweight_strategy(std::span<const double> credits, double alpha);

}  // namespace itema2c
