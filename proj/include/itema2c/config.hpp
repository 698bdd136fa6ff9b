#pragma once

// Run configuration: flat key = value pairs in [env], [agent], [training] and
// [output] sections. Every key has a default; unknown keys are rejected.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itema2c/agent.hpp"
#include "itema2c/user_env.hpp"

namespace itema2c {

struct TrainingConfig {
  std::size_t steps = 5000;
  std::size_t window = 100;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t eval_steps = 100;
};

struct OutputConfig {
  std::string dir = "runs";
  bool checkpoint = true;
};

struct RunConfig {
  EnvConfig env;
  AgentConfig agent;
  TrainingConfig training;
  OutputConfig output;

  // Throws ConfigError.
  void validate() const;
};

// Carries every offending key so callers can list them together.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string message, std::vector<std::string> keys);
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
};

// "section.key" names in serialization order.
std::vector<std::string> config_keys();

RunConfig parse_config(std::string_view text);
// Throws std::runtime_error when the file cannot be read, ConfigError when it
// does not validate.
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Key is "section.key". Throws ConfigError on an unknown key or a bad value.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& config, std::string_view key);

// 12 hex digits of a 64-bit FNV-1a hash.
std::string hash_id(std::string_view text);

// hash_id over the serialized config and the seeds.
std::string run_id(const RunConfig& config, std::span<const std::uint64_t> seeds);

}  // namespace itema2c
