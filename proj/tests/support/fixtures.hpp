#pragma once

#include <memory>
#include <vector>

#include "itema2c/core_types.hpp"

namespace itema2c::fixtures {

inline ObservationPtr make_obs(std::int64_t user, std::vector<HistoryEntry> history = {}) {
  return std::make_shared<const Observation>(Observation{user, std::move(history)});
}

inline Transition make_transition(std::vector<int> items, std::vector<std::uint8_t> clicks, bool done = false,
                                  std::int64_t user = 0) {
  std::vector<ItemId> ids;
  for (int i : items) ids.push_back(ItemId{i});
  Transition t;
  t.obs = make_obs(user);
  std::vector<HistoryEntry> h;
  for (std::size_t k = 0; k < ids.size(); ++k) h.push_back({ids[k], clicks[k] != 0});
  t.action = RecList(ids);
  t.feedback = make_feedback(clicks, 1.0, -0.2);
  t.next_obs = make_obs(user, h);
  t.done = done;
  return t;
}

}  // namespace itema2c::fixtures
