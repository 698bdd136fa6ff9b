#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "itema2c/itema2c.h"

namespace {

int report(ia2c_status status) {
  std::fprintf(stderr, "error (%s): %s\n", ia2c_status_name(status), ia2c_last_error());
  return static_cast<int>(status);
}

struct ConfigHandle {
  ia2c_config* ptr = nullptr;
  ~ConfigHandle() { ia2c_config_free(ptr); }
};

struct ResultHandle {
  ia2c_result* ptr = nullptr;
  ~ResultHandle() { ia2c_result_free(ptr); }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("list", "not a number: '" + item + "'");
    }
    if (used != item.size()) throw CLI::ValidationError("list", "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty() || (!text.empty() && text.back() == ',')) throw CLI::ValidationError("list", "empty entry in '" + text + "'");
  return out;
}

// Loads the config (or defaults when path is empty) and applies overrides.
ia2c_status load_config(const std::string& path, ConfigHandle& config) {
  if (path.empty()) return ia2c_config_default(&config.ptr);
  return ia2c_config_load(path.c_str(), &config.ptr);
}

ia2c_status set(ConfigHandle& config, const char* key, const std::string& value) {
  return ia2c_config_set(config.ptr, key, value.c_str());
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_progress(void*, uint64_t seed, size_t step, size_t total, double reward, double depth) {
  if (step % 500 != 0 && step != total) return;
  std::fprintf(stderr, "seed %llu step %zu/%zu  reward %.3f  depth %.2f\n", static_cast<unsigned long long>(seed), step,
               total, reward, depth);
}

void print_sweep_run(void*, double value, uint64_t seed, int ok, const char* error) {
  std::fprintf(stderr, "value %g seed %llu: %s%s%s\n", value, static_cast<unsigned long long>(seed),
               ok ? "ok" : "FAILED", ok ? "" : " ", ok ? "" : error);
}

void print_line(void*, const char* line) { std::printf("%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Item-wise advantage actor-critic for list recommendation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_root;
  bool force = false;
  bool quiet = false;

  auto* train = app.add_subcommand("train", "Train one agent for each seed and write curves, checkpoints and a summary");
  std::optional<uint64_t> train_seed;
  std::string train_agent;
  std::optional<double> train_alpha;
  std::optional<std::size_t> train_steps;
  train->add_option("config", config_path, "Run configuration (INI)")->required();
  train->add_option("--seed", train_seed, "Train this seed only");
  train->add_option("--agent", train_agent, "Agent kind");
  train->add_option("--alpha", train_alpha, "Reweighting alpha");
  train->add_option("--steps", train_steps, "Training steps");
  train->add_option("--out", out_root, "Output root (default: $ITEMA2C_OUTPUT_ROOT, then output.dir)");
  train->add_flag("--force", force, "Replace an existing run directory");
  train->add_flag("-q,--quiet", quiet, "No progress on stderr");

  auto* sweep = app.add_subcommand("sweep", "Train across values of alpha or list size");
  std::string sweep_param;
  std::string sweep_values;
  std::optional<std::size_t> sweep_seeds;
  std::size_t sweep_jobs = 1;
  std::optional<std::size_t> sweep_steps;
  sweep->add_option("config", config_path, "Run configuration (INI)")->required();
  sweep->add_option("--param", sweep_param, "alpha or k")->required()->check(CLI::IsMember({"alpha", "k"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("--seeds", sweep_seeds, "Use seeds 1..n instead of training.seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", sweep_jobs, "Parallel runs");
  sweep->add_option("--steps", sweep_steps, "Training steps");
  sweep->add_option("--out", out_root, "Output root");
  sweep->add_flag("--force", force, "Replace an existing sweep directory");
  sweep->add_flag("-q,--quiet", quiet, "No per-run lines on stderr");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every loss gradient");
  std::size_t gc_instances = 10;
  bool inject_bug = false;
  gradcheck->add_option("--instances", gc_instances, "Random instances per loss family")->check(CLI::PositiveNumber);
  gradcheck->add_flag("--inject-bug", inject_bug, "Corrupt one analytic gradient (self-test of the checker)");

  auto* weights = app.add_subcommand("weights", "Print future-impact shares for a list of click credits");
  std::string credits_text;
  double weights_alpha = 1.0;
  weights->add_option("credits", credits_text, "Comma-separated credits, e.g. 1,0,0,1,0,0")->required();
  weights->add_option("--alpha", weights_alpha, "Reweighting alpha");

  auto* eval = app.add_subcommand("eval", "Greedy evaluation of a saved checkpoint");
  std::string checkpoint;
  uint64_t eval_seed = 1;
  std::optional<std::size_t> eval_steps;
  eval->add_option("config", config_path, "Run configuration the checkpoint was trained with")->required();
  eval->add_option("checkpoint", checkpoint, "checkpoint_seed<S>.txt")->required();
  eval->add_option("--seed", eval_seed, "Environment seed");
  eval->add_option("--steps", eval_steps, "Evaluation steps (default training.eval_steps)");

  CLI11_PARSE(app, argc, argv);

  if (*weights) {
    std::vector<double> credits;
    try {
      credits = parse_list(credits_text);
    } catch (const CLI::Error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
    std::vector<double> w(credits.size());
    if (auto s = ia2c_reweight(credits.data(), credits.size(), weights_alpha, w.data(), nullptr); s != IA2C_OK) {
      return report(s);
    }
    for (std::size_t k = 0; k < w.size(); ++k) std::printf(k ? ",%g" : "%g", w[k]);
    std::printf("\n");
    return 0;
  }

  if (*gradcheck) {
    int all_passed = 0;
    if (auto s = ia2c_gradcheck(gc_instances, inject_bug ? 1 : 0, print_line, nullptr, &all_passed); s != IA2C_OK) {
      return report(s);
    }
    std::printf("%s\n", all_passed ? "all loss gradients pass" : "gradient check FAILED");
    return all_passed ? 0 : static_cast<int>(IA2C_CHECK_FAILED);
  }

  ConfigHandle config;
  if (auto s = load_config(config_path, config); s != IA2C_OK) return report(s);

  if (*train) {
    if (!train_agent.empty()) {
      if (auto s = set(config, "agent.kind", train_agent); s != IA2C_OK) return report(s);
    }
    if (train_alpha) {
      if (auto s = set(config, "agent.alpha", number(*train_alpha)); s != IA2C_OK) return report(s);
    }
    if (train_steps) {
      if (auto s = set(config, "training.steps", std::to_string(*train_steps)); s != IA2C_OK) return report(s);
    }
    if (auto s = ia2c_config_validate(config.ptr); s != IA2C_OK) return report(s);
    ia2c_train_options opts{};
    opts.output_root = out_root.empty() ? nullptr : out_root.c_str();
    uint64_t seed = train_seed.value_or(0);
    if (train_seed) {
      opts.seeds = &seed;
      opts.n_seeds = 1;
    }
    opts.force = force ? 1 : 0;
    if (!quiet) opts.progress = print_progress;
    ResultHandle result;
    if (auto s = ia2c_train(config.ptr, &opts, &result.ptr); s != IA2C_OK) return report(s);
    std::printf("%s", ia2c_result_table(result.ptr));
    std::printf("wrote %s\n", ia2c_result_output_dir(result.ptr));
    return 0;
  }

  if (*sweep) {
    std::vector<double> values;
    try {
      values = parse_list(sweep_values);
    } catch (const CLI::Error& e) {
      std::fprintf(stderr, "error: --values: %s\n", e.what());
      return static_cast<int>(IA2C_INVALID_ARGUMENT);
    }
    if (sweep_steps) {
      if (auto s = set(config, "training.steps", std::to_string(*sweep_steps)); s != IA2C_OK) return report(s);
    }
    std::vector<uint64_t> seeds;
    if (sweep_seeds) {
      for (uint64_t s = 1; s <= *sweep_seeds; ++s) seeds.push_back(s);
    }
    ia2c_sweep_options opts{};
    opts.output_root = out_root.empty() ? nullptr : out_root.c_str();
    opts.seeds = seeds.empty() ? nullptr : seeds.data();
    opts.n_seeds = seeds.size();
    opts.jobs = sweep_jobs;
    opts.force = force ? 1 : 0;
    if (!quiet) opts.on_run = print_sweep_run;
    const auto param = sweep_param == "alpha" ? IA2C_SWEEP_ALPHA : IA2C_SWEEP_K;
    ResultHandle result;
    if (auto s = ia2c_sweep(config.ptr, param, values.data(), values.size(), &opts, &result.ptr); s != IA2C_OK) {
      return report(s);
    }
    std::printf("%s", ia2c_result_table(result.ptr));
    std::printf("wrote %s\n", ia2c_result_output_dir(result.ptr));
    return 0;
  }

  if (*eval) {
    std::size_t steps = 0;
    if (eval_steps) {
      steps = *eval_steps;
    } else {
      char buf[32];
      if (auto s = ia2c_config_get(config.ptr, "training.eval_steps", buf, sizeof buf, nullptr); s != IA2C_OK) {
        return report(s);
      }
      steps = std::stoul(buf);
    }
    ResultHandle result;
    if (auto s = ia2c_eval(config.ptr, checkpoint.c_str(), eval_seed, steps, &result.ptr); s != IA2C_OK) {
      return report(s);
    }
    std::printf("%s", ia2c_result_table(result.ptr));
    std::printf("%s", ia2c_result_summary_json(result.ptr));
    return 0;
  }
  return 0;
}
