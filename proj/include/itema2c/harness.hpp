#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itema2c/agent.hpp"
#include "itema2c/config.hpp"
#include "itema2c/metrics.hpp"

namespace itema2c {

// One row per training step. Window statistics cover sessions that finished
// during the last `window` steps, this one included.
struct MetricsRecord {
  std::size_t step = 0;
  WindowStats window;
  std::optional<double> critic_loss;
  std::optional<double> actor_loss;
  std::optional<double> weight_loss;
  std::optional<double> cosine_sim;
  std::optional<double> pearson;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  WindowStats window;  // over the final `window` steps
};

struct RunResult {
  RunSummary summary;
  std::vector<MetricsRecord> records;
  std::unique_ptr<Agent> agent;
};

using ProgressFn = std::function<void(const MetricsRecord&)>;

// Derived per-purpose seeds (environment, agent init, replay sampling, action
// sampling) from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

ProblemShape problem_shape(const EnvConfig& env);

// Online training: each step rolls out one request for every active user,
// pushes the transitions, then runs one agent update on a batch sampled with
// replacement. Finished users are replaced by fresh ones. Throws
// std::runtime_error on a non-finite loss.
RunResult run_training(const RunConfig& config, std::uint64_t seed, const ProgressFn& progress = {});

// Greedy rollouts without learning; statistics over every session that
// finished within `steps` steps.
WindowStats run_evaluation(const RunConfig& config, Agent& agent, std::uint64_t seed, std::size_t steps);

enum class SweepParam { alpha, list_size };

struct SweepRun {
  double value = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunSummary summary;
};

struct SweepRow {
  double value = 0.0;
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::optional<SeedAggregate> aggregate;
};

struct SweepResult {
  SweepParam param = SweepParam::alpha;
  std::vector<SweepRun> runs;
  std::vector<SweepRow> rows;
};

// Full cross of values x seeds. An alpha sweep trains the alpha-reweighted
// item agent. Failed runs are recorded and the sweep continues. With jobs > 1
// runs execute on that many threads; results do not depend on jobs.
SweepResult run_sweep(const RunConfig& config, SweepParam param, std::span<const double> values,
                      std::span<const std::uint64_t> seeds, std::size_t jobs = 1,
                      const std::function<void(const SweepRun&)>& on_run = {});

std::string_view to_string(SweepParam param);

void write_curve_csv(std::ostream& out, std::span<const MetricsRecord> records);
void write_sweep_runs_csv(std::ostream& out, const SweepResult& sweep);
void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep);

// Config echo, per-seed summaries and across-seed aggregate.
std::string summary_json(const RunConfig& config, std::span<const RunSummary> runs);
std::string sweep_json(const RunConfig& config, const SweepResult& sweep);

}  // namespace itema2c
