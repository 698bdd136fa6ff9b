#pragma once

// Request-level MDP vocabulary shared by the environment, the agents and the
// harness: item ids, recommendation lists, item-wise feedback, observations
// and replay transitions.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace itema2c {

using Rng = std::mt19937_64;

struct ItemId {
  std::int32_t index = 0;

  friend auto operator<=>(const ItemId&, const ItemId&) = default;
};

inline bool is_valid(ItemId item, std::size_t catalog_size) {
  return item.index >= 0 && static_cast<std::size_t>(item.index) < catalog_size;
}

// An ordered list of distinct items shown for one request.
class RecList {
 public:
  RecList() = default;
  // Throws std::invalid_argument on a negative or repeated id.
  explicit RecList(std::vector<ItemId> items);

  // Additionally checks every id against the catalog size.
  static RecList checked(std::vector<ItemId> items, std::size_t catalog_size);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const ItemId& operator[](std::size_t k) const { return items_[k]; }
  std::span<const ItemId> items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  friend bool operator==(const RecList&, const RecList&) = default;

 private:
  std::vector<ItemId> items_;
};

// Item-wise feedback for one request. rewards[k] is derived from clicks[k].
struct Feedback {
  std::vector<std::uint8_t> clicks;
  std::vector<double> rewards;

  std::size_t size() const { return rewards.size(); }
  // List-wise reward: the linear aggregation of the item rewards.
  double total() const;

  friend bool operator==(const Feedback&, const Feedback&) = default;
};

Feedback make_feedback(std::span<const std::uint8_t> clicks, double reward_click, double reward_miss);

struct HistoryEntry {
  ItemId item;
  bool clicked = false;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

// What an agent sees: the user id and the recent interaction window, oldest
// first. Never carries environment latents.
struct Observation {
  std::int64_t user_id = 0;
  std::vector<HistoryEntry> history;

  friend bool operator==(const Observation&, const Observation&) = default;
};

using ObservationPtr = std::shared_ptr<const Observation>;

// One request-level experience record. Observations are immutable snapshots;
// the next observation of request t is usually the observation of t+1, so they
// are shared rather than copied.
struct Transition {
  ObservationPtr obs;
  RecList action;
  Feedback feedback;
  ObservationPtr next_obs;
  bool done = false;
  // Continuous hyper-action behind the list (DDPG/HAC); empty otherwise.
  std::vector<double> hyper_action;

  std::size_t list_size() const { return action.size(); }
};

// Throws std::invalid_argument when list, click and reward lengths disagree or
// an observation is missing.
void validate(const Transition& t);

bool equivalent(const Transition& a, const Transition& b);

// Exact binary encoding (doubles by bit pattern).
std::string serialize(const Transition& t);
Transition deserialize_transition(std::string_view bytes);

// Inspection log: "user_id i_1 .. i_K c_1 .. c_K done", one request per line.
struct TransitionLogRecord {
  std::int64_t user_id = 0;
  std::vector<ItemId> items;
  std::vector<std::uint8_t> clicks;
  bool done = false;

  friend bool operator==(const TransitionLogRecord&, const TransitionLogRecord&) = default;
};

std::string to_log_line(const Transition& t);
TransitionLogRecord parse_log_line(std::string_view line);

}  // namespace itema2c
