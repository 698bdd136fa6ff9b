#include "itema2c/itema2c.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "itema2c/checkpoint.hpp"
#include "itema2c/config.hpp"
#include "itema2c/gradcheck_suite.hpp"
#include "itema2c/harness.hpp"
#include "itema2c/targets.hpp"

namespace fs = std::filesystem;
using namespace itema2c;

struct ia2c_config {
  RunConfig config;
};

struct ia2c_result {
  std::string output_dir;
  std::string summary_json;
  std::string table;
};

namespace {

thread_local std::string g_last_error;

// Thrown for failures that map to a specific status.
struct StatusError : std::runtime_error {
  StatusError(ia2c_status s, const std::string& message) : std::runtime_error(message), status(s) {}
  ia2c_status status;
};

ia2c_status fail(ia2c_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Fn>
ia2c_status guarded(Fn&& fn) {
  try {
    fn();
    return IA2C_OK;
  } catch (const StatusError& e) {
    return fail(e.status, e.what());
  } catch (const ConfigError& e) {
    return fail(IA2C_CONFIG_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(IA2C_INVALID_ARGUMENT, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(IA2C_IO_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(IA2C_INTERNAL, e.what());
  } catch (...) {
    return fail(IA2C_INTERNAL, "unknown error");
  }
}

ia2c_status copy_out(const std::string& value, char* buf, std::size_t size, std::size_t* needed) {
  if (needed) *needed = value.size() + 1;
  if (!buf) return needed ? IA2C_OK : fail(IA2C_INVALID_ARGUMENT, "null output buffer");
  if (size < value.size() + 1) return fail(IA2C_INVALID_ARGUMENT, "output buffer too small");
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return IA2C_OK;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw StatusError(IA2C_IO_ERROR, "cannot write " + path.string());
}

fs::path output_root(const RunConfig& config, const char* explicit_root) {
  if (explicit_root && *explicit_root) return explicit_root;
  if (const char* env = std::getenv("ITEMA2C_OUTPUT_ROOT"); env && *env) return env;
  return config.output.dir;
}

// Artifacts are written into a sibling staging directory and moved into
// place only once the whole run succeeded.
class StagedDirectory {
 public:
  StagedDirectory(fs::path target, bool force) : target_(std::move(target)), staging_(target_.string() + ".partial") {
    if (fs::exists(target_) && !force) {
      throw StatusError(IA2C_OUTPUT_EXISTS,
                        "output directory " + target_.string() + " already exists (use force to replace it)");
    }
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  ~StagedDirectory() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }

  const fs::path& path() const { return staging_; }

  std::string commit() {
    fs::remove_all(target_);
    fs::rename(staging_, target_);
    committed_ = true;
    return target_.string();
  }

 private:
  fs::path target_;
  fs::path staging_;
  bool committed_ = false;
};

std::vector<std::uint64_t> seed_list(const RunConfig& config, const std::uint64_t* seeds, std::size_t n) {
  if (seeds && n > 0) return {seeds, seeds + n};
  return config.training.seeds;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string stats_line(const WindowStats& w) {
  return "reward " + fmt(w.mean_reward) + " [" + fmt(w.min_reward) + ", " + fmt(w.max_reward) + "]  depth " +
         fmt(w.mean_depth) + " [" + fmt(w.min_depth) + ", " + fmt(w.max_depth) + "]  sessions " +
         std::to_string(w.sessions);
}

std::string aggregate_line(const SeedAggregate& a) {
  return "reward " + fmt(a.reward.mean) + " +- " + fmt(a.reward.std) + " (max " + fmt(a.reward.max) + ", min " +
         fmt(a.reward.min) + ")  depth " + fmt(a.depth.mean) + " +- " + fmt(a.depth.std) + " (max " +
         fmt(a.depth.max) + ", min " + fmt(a.depth.min) + ")";
}

}  // namespace

extern "C" {

const char* ia2c_last_error(void) { return g_last_error.c_str(); }

const char* ia2c_status_name(ia2c_status status) {
  switch (status) {
    case IA2C_OK: return "ok";
    case IA2C_INVALID_ARGUMENT: return "invalid argument";
    case IA2C_CONFIG_ERROR: return "configuration error";
    case IA2C_IO_ERROR: return "i/o error";
    case IA2C_OUTPUT_EXISTS: return "output exists";
    case IA2C_RUN_FAILED: return "run failed";
    case IA2C_CHECK_FAILED: return "check failed";
    case IA2C_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ia2c_status ia2c_config_default(ia2c_config** out) {
  if (!out) return fail(IA2C_INVALID_ARGUMENT, "null output handle");
  return guarded([&] { *out = new ia2c_config{}; });
}

ia2c_status ia2c_config_load(const char* path, ia2c_config** out) {
  if (!path || !out) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (!fs::exists(path)) throw StatusError(IA2C_IO_ERROR, std::string("config file not found: ") + path);
    RunConfig c;
    try {
      c = load_config_file(path);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw StatusError(IA2C_IO_ERROR, e.what());
    }
    *out = new ia2c_config{std::move(c)};
  });
}

ia2c_status ia2c_config_parse(const char* text, ia2c_config** out) {
  if (!text || !out) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new ia2c_config{parse_config(text)}; });
}

void ia2c_config_free(ia2c_config* config) { delete config; }

ia2c_status ia2c_config_set(ia2c_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  return guarded([&] { set_config_value(config->config, key, value); });
}

ia2c_status ia2c_config_validate(const ia2c_config* config) {
  if (!config) return fail(IA2C_INVALID_ARGUMENT, "null config");
  return guarded([&] { config->config.validate(); });
}

ia2c_status ia2c_config_get(const ia2c_config* config, const char* key, char* buf, size_t buf_size, size_t* needed) {
  if (!config || !key) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  std::string value;
  const ia2c_status s = guarded([&] { value = get_config_value(config->config, key); });
  return s == IA2C_OK ? copy_out(value, buf, buf_size, needed) : s;
}

ia2c_status ia2c_config_serialize(const ia2c_config* config, char* buf, size_t buf_size, size_t* needed) {
  if (!config) return fail(IA2C_INVALID_ARGUMENT, "null config");
  return copy_out(serialize_config(config->config), buf, buf_size, needed);
}

ia2c_status ia2c_run_id(const ia2c_config* config, const uint64_t* seeds, size_t n_seeds, char out[13]) {
  if (!config || !out) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  const auto id = run_id(config->config, seed_list(config->config, seeds, n_seeds));
  std::memcpy(out, id.c_str(), 13);
  return IA2C_OK;
}

ia2c_status ia2c_train(const ia2c_config* config, const ia2c_train_options* options, ia2c_result** out) {
  if (!config || !out) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  const ia2c_train_options opts = options ? *options : ia2c_train_options{};
  return guarded([&] {
    const RunConfig& c = config->config;
    c.validate();
    const auto seeds = seed_list(c, opts.seeds, opts.n_seeds);
    const fs::path target = output_root(c, opts.output_root) / run_id(c, seeds);
    StagedDirectory dir(target, opts.force != 0);

    std::vector<RunSummary> summaries;
    std::string table;
    for (auto seed : seeds) {
      ProgressFn progress;
      if (opts.progress) {
        progress = [&](const MetricsRecord& r) {
          opts.progress(opts.progress_user, seed, r.step, c.training.steps, r.window.mean_reward, r.window.mean_depth);
        };
      }
      RunResult run;
      try {
        run = run_training(c, seed, progress);
      } catch (const std::runtime_error& e) {
        throw StatusError(IA2C_RUN_FAILED, "seed " + std::to_string(seed) + ": " + e.what());
      }
      std::ostringstream csv;
      write_curve_csv(csv, run.records);
      write_file(dir.path() / ("curve_seed" + std::to_string(seed) + ".csv"), csv.str());
      if (c.output.checkpoint) {
        nn::save_checkpoint_file((dir.path() / ("checkpoint_seed" + std::to_string(seed) + ".txt")).string(),
                                 run.agent->stores());
      }
      table += "seed " + std::to_string(seed) + ": " + stats_line(run.summary.window) + "\n";
      summaries.push_back(run.summary);
    }
    std::vector<WindowStats> windows;
    for (const auto& s : summaries) windows.push_back(s.window);
    table += "aggregate over " + std::to_string(windows.size()) + " seeds: " + aggregate_line(aggregate_seeds(windows)) + "\n";

    auto result = std::make_unique<ia2c_result>();
    result->summary_json = summary_json(c, summaries);
    result->table = table;
    write_file(dir.path() / "summary.json", result->summary_json);
    write_file(dir.path() / "config.ini", serialize_config(c));
    result->output_dir = dir.commit();
    *out = result.release();
  });
}

ia2c_status ia2c_sweep(const ia2c_config* config, ia2c_sweep_param param, const double* values, size_t n_values,
                       const ia2c_sweep_options* options, ia2c_result** out) {
  if (!config || !out) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  if (!values || n_values == 0) return fail(IA2C_INVALID_ARGUMENT, "sweep needs at least one value");
  if (param != IA2C_SWEEP_ALPHA && param != IA2C_SWEEP_K) return fail(IA2C_INVALID_ARGUMENT, "unknown sweep parameter");
  const ia2c_sweep_options opts = options ? *options : ia2c_sweep_options{};
  return guarded([&] {
    const RunConfig& c = config->config;
    c.validate();
    const auto seeds = seed_list(c, opts.seeds, opts.n_seeds);
    const SweepParam p = param == IA2C_SWEEP_ALPHA ? SweepParam::alpha : SweepParam::list_size;
    const std::vector<double> vals(values, values + n_values);

    std::string key = serialize_config(c) + "sweep=" + std::string(to_string(p)) + ";values=";
    for (double v : vals) key += std::to_string(v) + ",";
    key += ";seeds=";
    for (auto s : seeds) key += std::to_string(s) + ",";
    const fs::path target = output_root(c, opts.output_root) / ("sweep-" + std::string(to_string(p)) + "-" + hash_id(key));
    StagedDirectory dir(target, opts.force != 0);

    std::function<void(const SweepRun&)> on_run;
    if (opts.on_run) {
      on_run = [&](const SweepRun& r) {
        opts.on_run(opts.on_run_user, r.value, r.seed, r.ok ? 1 : 0, r.error.c_str());
      };
    }
    const SweepResult sweep = run_sweep(c, p, vals, seeds, opts.jobs, on_run);

    std::ostringstream runs_csv;
    std::ostringstream summary_csv;
    write_sweep_runs_csv(runs_csv, sweep);
    write_sweep_summary_csv(summary_csv, sweep);
    write_file(dir.path() / "sweep_runs.csv", runs_csv.str());
    write_file(dir.path() / "sweep_summary.csv", summary_csv.str());

    auto result = std::make_unique<ia2c_result>();
    result->summary_json = sweep_json(c, sweep);
    for (const auto& row : sweep.rows) {
      char head[64];
      std::snprintf(head, sizeof head, "%s=%g: ", std::string(to_string(p)).c_str(), row.value);
      result->table += head;
      result->table += row.aggregate ? aggregate_line(*row.aggregate) : std::string("no successful runs");
      if (row.failed > 0) result->table += "  FAILED runs: " + std::to_string(row.failed);
      result->table += "\n";
    }
    write_file(dir.path() / "summary.json", result->summary_json);
    write_file(dir.path() / "config.ini", serialize_config(c));
    result->output_dir = dir.commit();
    *out = result.release();
  });
}

ia2c_status ia2c_eval(const ia2c_config* config, const char* checkpoint_path, uint64_t seed, size_t steps,
                      ia2c_result** out) {
  if (!config || !checkpoint_path || !out) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  if (steps == 0) return fail(IA2C_INVALID_ARGUMENT, "evaluation needs at least one step");
  return guarded([&] {
    const RunConfig& c = config->config;
    c.validate();
    if (!fs::exists(checkpoint_path)) {
      throw StatusError(IA2C_IO_ERROR, std::string("checkpoint not found: ") + checkpoint_path);
    }
    auto agent = make_agent(c.agent, problem_shape(c.env), 0);
    try {
      agent->load_stores(nn::load_checkpoint_file(checkpoint_path));
    } catch (const std::runtime_error& e) {
      throw StatusError(IA2C_IO_ERROR, e.what());
    }
    const WindowStats w = run_evaluation(c, *agent, seed, steps);
    auto result = std::make_unique<ia2c_result>();
    nlohmann::json j{{"checkpoint", checkpoint_path},
                     {"agent", std::string(to_string(c.agent.kind))},
                     {"seed", seed},
                     {"steps", steps},
                     {"sessions", w.sessions}};
    auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
    j["mean_reward"] = num(w.mean_reward);
    j["max_reward"] = num(w.max_reward);
    j["min_reward"] = num(w.min_reward);
    j["mean_depth"] = num(w.mean_depth);
    j["max_depth"] = num(w.max_depth);
    j["min_depth"] = num(w.min_depth);
    result->summary_json = j.dump(2) + "\n";
    result->table = "greedy evaluation: " + stats_line(w) + "\n";
    *out = result.release();
  });
}

const char* ia2c_result_output_dir(const ia2c_result* result) { return result ? result->output_dir.c_str() : ""; }
const char* ia2c_result_summary_json(const ia2c_result* result) { return result ? result->summary_json.c_str() : ""; }
const char* ia2c_result_table(const ia2c_result* result) { return result ? result->table.c_str() : ""; }
void ia2c_result_free(ia2c_result* result) { delete result; }

ia2c_status ia2c_gradcheck(size_t instances, int inject_bug, ia2c_line_fn on_line, void* user, int* all_passed) {
  if (instances == 0) return fail(IA2C_INVALID_ARGUMENT, "need at least one instance per family");
  return guarded([&] {
    GradCheckSuiteOptions o;
    o.instances = instances;
    o.inject_bug = inject_bug != 0;
    bool ok = true;
    for (const auto& r : run_gradcheck_suite(o)) {
      ok = ok && r.passed;
      char line[256];
      std::snprintf(line, sizeof line, "%-16s %s  instances=%zu failures=%zu max_rel_error=%.3e worst=%s",
                    r.family.c_str(), r.passed ? "PASS" : "FAIL", r.instances, r.failures, r.max_rel_error,
                    r.worst_param.empty() ? "-" : r.worst_param.c_str());
      if (on_line) on_line(user, line);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

ia2c_status ia2c_reweight(const double* credits, size_t k, double alpha, double* out_weights, int* fallback) {
  if (!credits || !out_weights) return fail(IA2C_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto w = reweight_strategy(std::span<const double>(credits, k), alpha);
    for (std::size_t i = 0; i < k; ++i) out_weights[i] = w[i];
    if (fallback) *fallback = w.fallback ? 1 : 0;
  });
}

}  // extern "C"
