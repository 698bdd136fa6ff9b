#include "itema2c/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "itema2c/replay_buffer.hpp"
#include "itema2c/user_env.hpp"

namespace itema2c {

namespace {

// Active users and their running session rewards.
class Rollout {
 public:
  explicit Rollout(const EnvConfig& env) : env_(env), sessions_(env_.reset()) {
    for (const auto& s : sessions_) observe(s);
    reward_.assign(sessions_.size(), 0.0);
  }

  void step(Agent& agent, ActMode mode, Rng& rng, ReplayBuffer* buffer, std::vector<FinishedSession>& finished) {
    std::vector<const Observation*> raw;
    raw.reserve(obs_.size());
    for (const auto& o : obs_) raw.push_back(o.get());
    ActResult acts = agent.act(raw, mode, rng);
    const double k = static_cast<double>(env_.config().list_size);
    for (std::size_t u = 0; u < sessions_.size(); ++u) {
      StepOutcome outcome = env_.step(sessions_[u], acts.lists[u]);
      auto next_obs = std::make_shared<const Observation>(env_.observation_of(outcome.next));
      reward_[u] += outcome.feedback.total() / k;
      if (outcome.done) finished.push_back({reward_[u], outcome.next.depth});
      if (buffer) {
        Transition t;
        t.obs = obs_[u];
        t.action = acts.lists[u];
        t.feedback = std::move(outcome.feedback);
        t.next_obs = next_obs;
        t.done = outcome.done;
        if (!acts.hyper_actions.empty()) t.hyper_action = std::move(acts.hyper_actions[u]);
        buffer->push(std::move(t));
      }
      if (outcome.done) {
        sessions_[u] = env_.new_session();
        obs_[u] = std::make_shared<const Observation>(env_.observation_of(sessions_[u]));
        reward_[u] = 0.0;
      } else {
        sessions_[u] = std::move(outcome.next);
        obs_[u] = std::move(next_obs);
      }
    }
  }

 private:
  void observe(const SessionState& s) { obs_.push_back(std::make_shared<const Observation>(env_.observation_of(s))); }

  UserEnvironment env_;
  std::vector<SessionState> sessions_;
  std::vector<ObservationPtr> obs_;
  std::vector<double> reward_;
};

// Finished sessions bucketed by step, keeping the most recent `width` steps.
class SessionWindow {
 public:
  explicit SessionWindow(std::size_t width) : width_(width) {}

  void push_step(std::vector<FinishedSession> finished) {
    buckets_.push_back(std::move(finished));
    if (buckets_.size() > width_) buckets_.pop_front();
  }

  WindowStats stats() const {
    std::vector<FinishedSession> all;
    for (const auto& b : buckets_) all.insert(all.end(), b.begin(), b.end());
    return window_stats(all);
  }

 private:
  std::size_t width_;
  std::deque<std::vector<FinishedSession>> buckets_;
};

void require_finite(const std::optional<double>& v, const char* what, std::size_t step) {
  if (v && !std::isfinite(*v)) {
    throw std::runtime_error(std::string("non-finite ") + what + " at step " + std::to_string(step));
  }
}

std::string field(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string field(const std::optional<double>& v) { return v ? field(*v) : std::string(); }

nlohmann::json stats_json(const WindowStats& w) {
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  return {{"sessions", w.sessions},       {"mean_reward", num(w.mean_reward)}, {"max_reward", num(w.max_reward)},
          {"min_reward", num(w.min_reward)}, {"mean_depth", num(w.mean_depth)},   {"max_depth", num(w.max_depth)},
          {"min_depth", num(w.min_depth)},   {"reward_variance", num(w.reward_variance)}};
}

nlohmann::json aggregate_json(const SeedAggregate& a) {
  auto metric = [](const MetricAggregate& m) {
    return nlohmann::json{{"mean", m.mean}, {"std", m.std}, {"max", m.max}, {"min", m.min}};
  };
  return {{"runs", a.runs}, {"total_reward", metric(a.reward)}, {"depth", metric(a.depth)}};
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& key : config_keys()) out[key] = get_config_value(config, key);
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

ProblemShape problem_shape(const EnvConfig& env) { return {env.n_users, env.n_items, env.list_size}; }

RunResult run_training(const RunConfig& config, std::uint64_t seed, const ProgressFn& progress) {
  config.validate();
  EnvConfig env = config.env;
  env.seed = derive_seed(seed, 0);
  RunResult result;
  result.agent = make_agent(config.agent, problem_shape(env), derive_seed(seed, 1));
  ReplayBuffer buffer(config.agent.buffer_capacity, derive_seed(seed, 2));
  Rng act_rng(derive_seed(seed, 3));
  Rollout rollout(env);
  SessionWindow window(config.training.window);
  result.records.reserve(config.training.steps);

  for (std::size_t step = 1; step <= config.training.steps; ++step) {
    std::vector<FinishedSession> finished;
    rollout.step(*result.agent, ActMode::sample, act_rng, &buffer, finished);
    window.push_step(std::move(finished));

    MetricsRecord rec;
    rec.step = step;
    if (!buffer.empty()) {
      const TrainDiagnostics d = result.agent->train_step(buffer);
      rec.critic_loss = d.critic_loss;
      rec.actor_loss = d.actor_loss;
      rec.weight_loss = d.weight_loss;
      if (d.model_weights.size() > 0) {
        const Similarity s = weight_similarity(d.model_weights, d.strategy_weights);
        if (!std::isnan(s.cosine)) rec.cosine_sim = s.cosine;
        if (!std::isnan(s.pearson)) rec.pearson = s.pearson;
      }
    }
    require_finite(rec.critic_loss, "critic loss", step);
    require_finite(rec.actor_loss, "actor loss", step);
    require_finite(rec.weight_loss, "weight loss", step);
    rec.window = window.stats();
    if (progress) progress(rec);
    result.records.push_back(std::move(rec));
  }
  result.summary.seed = seed;
  result.summary.steps = config.training.steps;
  result.summary.window = result.records.back().window;
  return result;
}

WindowStats run_evaluation(const RunConfig& config, Agent& agent, std::uint64_t seed, std::size_t steps) {
  EnvConfig env = config.env;
  env.seed = derive_seed(seed, 0);
  env.validate();
  Rollout rollout(env);
  Rng rng(derive_seed(seed, 3));
  std::vector<FinishedSession> finished;
  for (std::size_t step = 0; step < steps; ++step) rollout.step(agent, ActMode::greedy, rng, nullptr, finished);
  return window_stats(finished);
}

std::string_view to_string(SweepParam param) { return param == SweepParam::alpha ? "alpha" : "k"; }

SweepResult run_sweep(const RunConfig& config, SweepParam param, std::span<const double> values,
                      std::span<const std::uint64_t> seeds, std::size_t jobs,
                      const std::function<void(const SweepRun&)>& on_run) {
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  if (seeds.empty()) throw std::invalid_argument("sweep: empty seed list");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sweep: non-finite value");
    if (param == SweepParam::list_size && (v < 1 || v != std::floor(v))) {
      throw std::invalid_argument("sweep: list sizes must be positive integers");
    }
  }
  SweepResult result;
  result.param = param;
  for (double v : values) {
    for (auto s : seeds) result.runs.push_back({v, s, false, {}, {}});
  }

  std::mutex report_mutex;
  auto execute = [&](SweepRun& run) {
    try {
      RunConfig c = config;
      if (param == SweepParam::alpha) {
        c.agent.kind = AgentKind::item_a2c;
        c.agent.alpha = run.value;
      } else {
        c.env.list_size = static_cast<std::size_t>(run.value);
      }
      run.summary = run_training(c, run.seed).summary;
      run.ok = true;
    } catch (const std::exception& e) {
      run.ok = false;
      run.error = e.what();
    }
    if (on_run) {
      std::lock_guard<std::mutex> lock(report_mutex);
      on_run(run);
    }
  };

  if (jobs <= 1) {
    for (auto& run : result.runs) execute(run);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t j = 0; j < jobs; ++j) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < result.runs.size(); i = next++) execute(result.runs[i]);
      });
    }
    for (auto& w : workers) w.join();
  }

  for (double v : values) {
    SweepRow row;
    row.value = v;
    std::vector<WindowStats> ok;
    for (const auto& run : result.runs) {
      if (run.value != v) continue;
      if (run.ok) {
        ++row.ok;
        ok.push_back(run.summary.window);
      } else {
        ++row.failed;
      }
    }
    if (!ok.empty()) row.aggregate = aggregate_seeds(ok);
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_curve_csv(std::ostream& out, std::span<const MetricsRecord> records) {
  out << "step,mean_reward,max_reward,min_reward,mean_depth,max_depth,min_depth,reward_variance,"
         "critic_loss,actor_loss,weight_loss,cosine_sim,pearson\n";
  for (const auto& r : records) {
    const auto& w = r.window;
    out << r.step << ',' << field(w.mean_reward) << ',' << field(w.max_reward) << ',' << field(w.min_reward) << ','
        << field(w.mean_depth) << ',' << field(w.max_depth) << ',' << field(w.min_depth) << ','
        << field(w.reward_variance) << ',' << field(r.critic_loss) << ',' << field(r.actor_loss) << ','
        << field(r.weight_loss) << ',' << field(r.cosine_sim) << ',' << field(r.pearson) << '\n';
  }
}

void write_sweep_runs_csv(std::ostream& out, const SweepResult& sweep) {
  out << to_string(sweep.param)
      << ",seed,status,sessions,mean_reward,max_reward,min_reward,mean_depth,max_depth,min_depth,reward_variance,error\n";
  for (const auto& r : sweep.runs) {
    const auto& w = r.summary.window;
    std::string error = r.error;
    for (char& c : error) {
      if (c == ',' || c == '\n') c = ' ';
    }
    out << field(r.value) << ',' << r.seed << ',' << (r.ok ? "ok" : "FAILED") << ',' << (r.ok ? std::to_string(w.sessions) : "")
        << ',' << field(w.mean_reward) << ',' << field(w.max_reward) << ',' << field(w.min_reward) << ','
        << field(w.mean_depth) << ',' << field(w.max_depth) << ',' << field(w.min_depth) << ','
        << field(w.reward_variance) << ',' << error << '\n';
  }
}

void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep) {
  out << to_string(sweep.param)
      << ",runs_ok,runs_failed,reward_mean,reward_std,reward_max,reward_min,depth_mean,depth_std,depth_max,depth_min\n";
  for (const auto& row : sweep.rows) {
    out << field(row.value) << ',' << row.ok << ',' << row.failed;
    if (row.aggregate) {
      const auto& a = *row.aggregate;
      for (double v : {a.reward.mean, a.reward.std, a.reward.max, a.reward.min, a.depth.mean, a.depth.std, a.depth.max,
                       a.depth.min}) {
        out << ',' << field(v);
      }
    } else {
      out << ",,,,,,,,";
    }
    out << '\n';
  }
}

std::string summary_json(const RunConfig& config, std::span<const RunSummary> runs) {
  nlohmann::json j;
  j["config"] = config_json(config);
  j["runs"] = nlohmann::json::array();
  std::vector<WindowStats> windows;
  for (const auto& r : runs) {
    j["runs"].push_back({{"seed", r.seed}, {"steps", r.steps}, {"window", stats_json(r.window)}});
    windows.push_back(r.window);
  }
  if (!windows.empty()) j["aggregate"] = aggregate_json(aggregate_seeds(windows));
  return j.dump(2) + "\n";
}

std::string sweep_json(const RunConfig& config, const SweepResult& sweep) {
  nlohmann::json j;
  j["config"] = config_json(config);
  j["param"] = std::string(to_string(sweep.param));
  j["runs"] = nlohmann::json::array();
  for (const auto& r : sweep.runs) {
    nlohmann::json run{{"value", r.value}, {"seed", r.seed}, {"ok", r.ok}};
    if (r.ok) run["window"] = stats_json(r.summary.window);
    else run["error"] = r.error;
    j["runs"].push_back(run);
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& row : sweep.rows) {
    nlohmann::json r{{"value", row.value}, {"runs_ok", row.ok}, {"runs_failed", row.failed}};
    if (row.aggregate) r["aggregate"] = aggregate_json(*row.aggregate);
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

}  // namespace itema2c
