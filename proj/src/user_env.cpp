#include "itema2c/user_env.hpp"

#include <cmath>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace itema2c {

namespace {

void normalize(std::span<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw std::logic_error("cannot normalize a zero vector");
  for (double& x : v) x /= norm;
}

void fill_unit_gaussian(std::span<double> v, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& x : v) x = g(rng);
  normalize(v);
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("env.") + field + ": " + what);
}

}  // namespace

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void EnvConfig::validate() const {
  require(n_items >= 1, "n_items", "must be >= 1");
  require(dim >= 1, "dim", "must be >= 1");
  require(list_size >= 1, "list_size", "must be >= 1");
  require(list_size <= n_items, "list_size", "must not exceed n_items");
  require(max_depth >= 1, "max_depth", "must be >= 1");
  require(batch_users >= 1, "batch_users", "must be >= 1");
  require(n_users >= 1, "n_users", "must be >= 1");
  require(n_topics >= 1, "n_topics", "must be >= 1");
  require(item_noise >= 0.0, "item_noise", "must be >= 0");
  require(user_noise >= 0.0, "user_noise", "must be >= 0");
  require(drift >= 0.0, "drift", "must be >= 0");
  require(patience_init > 0.0, "patience_init", "must be > 0");
  require(patience_miss_cost >= 0.0, "patience_miss_cost", "must be >= 0");
  require(reward_click > reward_miss, "reward_click", "must exceed reward_miss");
  require(history_window >= 1, "history_window", "must be >= 1");
}

UserEnvironment::UserEnvironment(const EnvConfig& config) : config_(config), rng_(config.seed) {
  config_.validate();
  const auto d = config_.dim;
  // Catalog and user population come from a stream independent of the
  // interaction stream so that reset() never changes them.
  Rng gen(config_.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> g(0.0, 1.0);

  std::vector<double> centres(config_.n_topics * d);
  for (std::size_t t = 0; t < config_.n_topics; ++t) fill_unit_gaussian({centres.data() + t * d, d}, gen);

  catalog_.n_items = config_.n_items;
  catalog_.dim = d;
  catalog_.latent.resize(config_.n_items * d);
  for (std::size_t i = 0; i < config_.n_items; ++i) {
    const double* c = centres.data() + (i % config_.n_topics) * d;
    std::span<double> row(catalog_.latent.data() + i * d, d);
    for (std::size_t j = 0; j < d; ++j) row[j] = c[j] + config_.item_noise * g(gen);
    normalize(row);
  }

  std::uniform_int_distribution<std::size_t> topic(0, config_.n_topics - 1);
  user_pref_.resize(config_.n_users * d);
  for (std::size_t u = 0; u < config_.n_users; ++u) {
    const double* c = centres.data() + topic(gen) * d;
    std::span<double> row(user_pref_.data() + u * d, d);
    for (std::size_t j = 0; j < d; ++j) row[j] = c[j] + config_.user_noise * g(gen);
    normalize(row);
  }
}

std::span<const double> UserEnvironment::base_preference(std::int64_t user_id) const {
  if (user_id < 0 || static_cast<std::size_t>(user_id) >= config_.n_users) {
    throw std::invalid_argument("unknown user id " + std::to_string(user_id));
  }
  return {user_pref_.data() + static_cast<std::size_t>(user_id) * config_.dim, config_.dim};
}

SessionState UserEnvironment::session_for(std::int64_t user_id) const {
  SessionState s;
  s.user_id = user_id;
  auto base = base_preference(user_id);
  s.pref.assign(base.begin(), base.end());
  s.patience = config_.patience_init;
  return s;
}

SessionState UserEnvironment::new_session() {
  std::uniform_int_distribution<std::int64_t> pick(0, static_cast<std::int64_t>(config_.n_users) - 1);
  return session_for(pick(rng_));
}

std::vector<SessionState> UserEnvironment::reset() {
  rng_.seed(config_.seed);
  std::vector<SessionState> sessions;
  sessions.reserve(config_.batch_users);
  for (std::size_t i = 0; i < config_.batch_users; ++i) sessions.push_back(new_session());
  return sessions;
}

double UserEnvironment::click_probability(const SessionState& state, ItemId item) const {
  if (!is_valid(item, catalog_.n_items)) throw std::invalid_argument("invalid item id");
  auto latent = catalog_.latent_of(item);
  double dot = 0.0;
  for (std::size_t j = 0; j < config_.dim; ++j) dot += state.pref[j] * latent[j];
  return logistic(config_.click_bias + config_.click_scale * dot);
}

StepOutcome UserEnvironment::step(const SessionState& state, const RecList& action) {
  return step(state, action, rng_);
}

StepOutcome UserEnvironment::step(const SessionState& state, const RecList& action, Rng& rng) const {
  if (state.done) throw std::logic_error("cannot step a finished session");
  if (action.size() != config_.list_size) {
    throw std::invalid_argument("list has " + std::to_string(action.size()) + " items, expected " +
                                std::to_string(config_.list_size));
  }
  for (const auto& item : action) {
    if (!is_valid(item, catalog_.n_items)) throw std::invalid_argument("invalid item id in list");
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::uint8_t> clicks(action.size());
  for (std::size_t k = 0; k < action.size(); ++k) {
    clicks[k] = unif(rng) < click_probability(state, action[k]) ? 1 : 0;
  }

  StepOutcome out;
  out.feedback = make_feedback(clicks, config_.reward_click, config_.reward_miss);
  out.next = state;
  SessionState& next = out.next;

  std::size_t misses = 0;
  bool any_click = false;
  for (std::size_t k = 0; k < action.size(); ++k) {
    if (clicks[k]) {
      any_click = true;
      auto latent = catalog_.latent_of(action[k]);
      for (std::size_t j = 0; j < config_.dim; ++j) next.pref[j] += config_.drift * latent[j];
    } else {
      ++misses;
    }
  }
  if (any_click) normalize(next.pref);

  next.patience -= 1.0 + config_.patience_miss_cost * static_cast<double>(misses);
  next.depth += 1;

  for (std::size_t k = 0; k < action.size(); ++k) next.history.push_back({action[k], clicks[k] != 0});
  if (next.history.size() > config_.history_window) {
    next.history.erase(next.history.begin(),
                       next.history.begin() + static_cast<std::ptrdiff_t>(next.history.size() - config_.history_window));
  }

  next.done = next.patience <= 0.0 || next.depth >= config_.max_depth;
  out.done = next.done;
  return out;
}

Observation UserEnvironment::observation_of(const SessionState& state) const {
  Observation o;
  o.user_id = state.user_id;
  const auto n = state.history.size();
  const auto keep = std::min(n, config_.history_window);
  o.history.assign(state.history.end() - static_cast<std::ptrdiff_t>(keep), state.history.end());
  return o;
}

}  // namespace itema2c
