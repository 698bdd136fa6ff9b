#pragma once

#include <span>
#include <vector>

#include "itema2c/core_types.hpp"

namespace itema2c {

enum class ActMode { sample, greedy };

std::vector<double> softmax(std::span<const double> scores);
std::vector<double> log_softmax(std::span<const double> scores);

// Indices of the k largest scores, best first; ties go to the lower index.
std::vector<ItemId> top_k(std::span<const double> scores, std::size_t k);

// k distinct items by sequential softmax sampling without replacement.
std::vector<ItemId> sample_without_replacement(std::span<const double> scores, std::size_t k, Rng& rng);

// List selection over the full candidate pool. Throws std::invalid_argument
// when k exceeds the pool.
struct ListSelection {
  RecList list;
  // log softmax over the full pool of each chosen item (independent per item).
  std::vector<double> log_probs;
};

ListSelection select_list(std::span<const double> scores, std::size_t k, ActMode mode, Rng& rng);

}  // namespace itema2c
