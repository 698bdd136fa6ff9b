#pragma once

#include <cstddef>
#include <span>

#include "itema2c/core_types.hpp"
#include "itema2c/nn.hpp"

namespace itema2c {

// Undiscounted sum over requests of the per-request mean item reward.
// Throws std::invalid_argument on an empty trace.
double session_total_reward(std::span<const Feedback> trace);

struct FinishedSession {
  double total_reward = 0.0;
  std::size_t depth = 0;
};

// Statistics over sessions that finished inside the evaluation window. All
// fields are NaN when no session finished.
struct WindowStats {
  std::size_t sessions = 0;
  double mean_reward;
  double max_reward;
  double min_reward;
  double mean_depth;
  double max_depth;
  double min_depth;
  double reward_variance;  // population variance across sessions

  WindowStats();
};

WindowStats window_stats(std::span<const FinishedSession> sessions);

struct Similarity {
  double cosine;   // mean over rows; NaN when every row has zero norm
  double pearson;  // pooled over all entries; NaN when either side is constant
  std::size_t skipped_rows = 0;
};

// Throws std::invalid_argument on a shape mismatch or empty input.
Similarity weight_similarity(const nn::Matrix& model_weights, const nn::Matrix& strategy_weights);

// Across-seed statistics of per-run window summaries: mean and population std
// of the run means, max of the run maxima, min of the run minima.
struct MetricAggregate {
  double mean;
  double std;
  double max;
  double min;
};

struct SeedAggregate {
  std::size_t runs = 0;
  MetricAggregate reward;
  MetricAggregate depth;
};

// Throws std::invalid_argument on an empty input.
SeedAggregate aggregate_seeds(std::span<const WindowStats> runs);

}  // namespace itema2c
