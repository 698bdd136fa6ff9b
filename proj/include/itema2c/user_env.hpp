#pragma once

// Seedable synthetic user environment: a latent item catalog, per-user base
// preferences, independent logistic clicks per item, preference drift toward
// clicked items and a patience budget that ends the session.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "itema2c/core_types.hpp"

namespace itema2c {

struct EnvConfig {
  std::size_t n_items = 1000;
  std::size_t dim = 16;
  std::size_t list_size = 6;
  std::size_t max_depth = 20;
  std::size_t batch_users = 64;
  std::size_t n_users = 1000;
  std::size_t n_topics = 10;
  double item_noise = 0.1;
  double user_noise = 0.1;
  double click_bias = -4.0;
  double click_scale = 10.0;
  double drift = 0.1;
  double patience_init = 20.0;
  double patience_miss_cost = 0.5;
  double reward_click = 1.0;
  double reward_miss = -0.2;
  std::size_t history_window = 120;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Unit-norm latent vectors, row-major n_items x dim.
struct ItemCatalog {
  std::size_t n_items = 0;
  std::size_t dim = 0;
  std::vector<double> latent;

  std::span<const double> latent_of(ItemId item) const {
    return {latent.data() + static_cast<std::size_t>(item.index) * dim, dim};
  }
};

struct SessionState {
  std::int64_t user_id = 0;
  std::vector<double> pref;  // unit norm, environment-private
  double patience = 0.0;
  std::size_t depth = 0;
  std::vector<HistoryEntry> history;  // newest last, at most history_window entries
  bool done = false;
};

struct StepOutcome {
  Feedback feedback;
  SessionState next;
  bool done = false;
};

double logistic(double x);

class UserEnvironment {
 public:
  explicit UserEnvironment(const EnvConfig& config);

  const EnvConfig& config() const { return config_; }
  const ItemCatalog& catalog() const { return catalog_; }
  std::span<const double> base_preference(std::int64_t user_id) const;

  // Re-seeds the interaction stream and returns batch_users fresh sessions.
  std::vector<SessionState> reset();

  // A fresh session for a uniformly drawn user (used to refill finished slots).
  SessionState new_session();
  SessionState session_for(std::int64_t user_id) const;

  double click_probability(const SessionState& state, ItemId item) const;

  // Throws std::logic_error on a finished session, std::invalid_argument on a
  // malformed list.
  StepOutcome step(const SessionState& state, const RecList& action);
  StepOutcome step(const SessionState& state, const RecList& action, Rng& rng) const;

  Observation observation_of(const SessionState& state) const;

 private:
  EnvConfig config_;
  ItemCatalog catalog_;
  std::vector<double> user_pref_;  // n_users x dim
  Rng rng_;
};

}  // namespace itema2c
