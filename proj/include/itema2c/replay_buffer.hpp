#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "itema2c/core_types.hpp"

namespace itema2c {

// Fixed-capacity ring of transitions with uniform sampling (with
// replacement). Single writer, single reader; no internal locking.
class ReplayBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 100000;
  static constexpr std::size_t kDefaultBatch = 128;

  explicit ReplayBuffer(std::size_t capacity = kDefaultCapacity, std::uint64_t seed = 0);

  // Validates the transition; evicts the oldest entry when full.
  void push(Transition t);

  // Throws std::logic_error when empty.
  std::vector<Transition> sample(std::size_t batch);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }

  // i = 0 is the oldest stored entry.
  const Transition& at(std::size_t i) const;
  const Transition& newest() const;

 private:
  std::size_t capacity_;
  std::vector<Transition> entries_;
  std::size_t cursor_ = 0;  // next slot to overwrite once full
  Rng rng_;
};

}  // namespace itema2c
