#include "itema2c/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace itema2c {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity_ == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  entries_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Transition t) {
  validate(t);
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(t));
    return;
  }
  entries_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch) {
  if (entries_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, entries_.size() - 1);
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(entries_[pick(rng_)]);
  return out;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= entries_.size()) throw std::out_of_range("replay buffer index out of range");
  if (entries_.size() < capacity_) return entries_[i];
  return entries_[(cursor_ + i) % capacity_];
}

const Transition& ReplayBuffer::newest() const {
  if (entries_.empty()) throw std::logic_error("replay buffer is empty");
  return at(entries_.size() - 1);
}

}  // namespace itema2c
