#include "itema2c/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace itema2c {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(std::string_view text) {
  T out{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) throw std::invalid_argument("not a number");
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("not a boolean");
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    out.push_back(parse_number<std::uint64_t>(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) out += (i ? "," : "") + std::to_string(seeds[i]);
  return out;
}

struct KeySpec {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

template <class T>
KeySpec size_key(std::string name, T RunConfig::*section, std::size_t T::*field) {
  return {std::move(name), [=](const RunConfig& c) { return std::to_string(c.*section.*field); },
          [=](RunConfig& c, std::string_view v) { c.*section.*field = parse_number<std::size_t>(v); }};
}

template <class T>
KeySpec index_key(std::string name, T RunConfig::*section, nn::Index T::*field) {
  return {std::move(name), [=](const RunConfig& c) { return std::to_string(c.*section.*field); },
          [=](RunConfig& c, std::string_view v) { c.*section.*field = parse_number<nn::Index>(v); }};
}

template <class T>
KeySpec double_key(std::string name, T RunConfig::*section, double T::*field) {
  return {std::move(name), [=](const RunConfig& c) { return format_double(c.*section.*field); },
          [=](RunConfig& c, std::string_view v) { c.*section.*field = parse_number<double>(v); }};
}

template <class T>
KeySpec bool_key(std::string name, T RunConfig::*section, bool T::*field) {
  return {std::move(name), [=](const RunConfig& c) { return std::string(c.*section.*field ? "true" : "false"); },
          [=](RunConfig& c, std::string_view v) { c.*section.*field = parse_bool(v); }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    using R = RunConfig;
    std::vector<KeySpec> t;
    t.push_back(size_key("env.n_items", &R::env, &EnvConfig::n_items));
    t.push_back(size_key("env.dim", &R::env, &EnvConfig::dim));
    t.push_back(size_key("env.list_size", &R::env, &EnvConfig::list_size));
    t.push_back(size_key("env.max_depth", &R::env, &EnvConfig::max_depth));
    t.push_back(size_key("env.batch_users", &R::env, &EnvConfig::batch_users));
    t.push_back(size_key("env.n_users", &R::env, &EnvConfig::n_users));
    t.push_back(size_key("env.n_topics", &R::env, &EnvConfig::n_topics));
    t.push_back(double_key("env.item_noise", &R::env, &EnvConfig::item_noise));
    t.push_back(double_key("env.user_noise", &R::env, &EnvConfig::user_noise));
    t.push_back(double_key("env.click_bias", &R::env, &EnvConfig::click_bias));
    t.push_back(double_key("env.click_scale", &R::env, &EnvConfig::click_scale));
    t.push_back(double_key("env.drift", &R::env, &EnvConfig::drift));
    t.push_back(double_key("env.patience_init", &R::env, &EnvConfig::patience_init));
    t.push_back(double_key("env.patience_miss_cost", &R::env, &EnvConfig::patience_miss_cost));
    t.push_back(double_key("env.reward_click", &R::env, &EnvConfig::reward_click));
    t.push_back(double_key("env.reward_miss", &R::env, &EnvConfig::reward_miss));
    t.push_back(size_key("env.history_window", &R::env, &EnvConfig::history_window));

    t.push_back({"agent.kind", [](const R& c) { return std::string(to_string(c.agent.kind)); },
                 [](R& c, std::string_view v) { c.agent.kind = parse_agent_kind(v); }});
    t.push_back(double_key("agent.alpha", &R::agent, &AgentConfig::alpha));
    t.push_back(double_key("agent.gamma", &R::agent, &AgentConfig::gamma));
    t.push_back(double_key("agent.critic_lr", &R::agent, &AgentConfig::critic_lr));
    t.push_back(double_key("agent.actor_lr", &R::agent, &AgentConfig::actor_lr));
    t.push_back(double_key("agent.weight_lr", &R::agent, &AgentConfig::weight_lr));
    t.push_back(double_key("agent.target_rho", &R::agent, &AgentConfig::target_rho));
    t.push_back(size_key("agent.batch_size", &R::agent, &AgentConfig::batch_size));
    t.push_back(size_key("agent.buffer_capacity", &R::agent, &AgentConfig::buffer_capacity));
    t.push_back(index_key("agent.user_dim", &R::agent, &AgentConfig::user_dim));
    t.push_back(index_key("agent.item_dim", &R::agent, &AgentConfig::item_dim));
    t.push_back(index_key("agent.state_dim", &R::agent, &AgentConfig::state_dim));
    t.push_back(index_key("agent.hidden", &R::agent, &AgentConfig::hidden));
    t.push_back(double_key("agent.init_scale", &R::agent, &AgentConfig::init_scale));
    t.push_back(bool_key("agent.critic_decomposition", &R::agent, &AgentConfig::critic_decomposition));
    t.push_back(double_key("agent.slateq_epsilon", &R::agent, &AgentConfig::slateq_epsilon));
    t.push_back(double_key("agent.exploration_noise", &R::agent, &AgentConfig::exploration_noise));
    t.push_back(double_key("agent.hac_critic_coef", &R::agent, &AgentConfig::hac_critic_coef));
    t.push_back(double_key("agent.hac_actor_coef", &R::agent, &AgentConfig::hac_actor_coef));
    t.push_back(double_key("agent.hac_hyper_coef", &R::agent, &AgentConfig::hac_hyper_coef));
    t.push_back(double_key("agent.hac_supervision_coef", &R::agent, &AgentConfig::hac_supervision_coef));

    t.push_back(size_key("training.steps", &R::training, &TrainingConfig::steps));
    t.push_back(size_key("training.window", &R::training, &TrainingConfig::window));
    t.push_back({"training.seeds", [](const R& c) { return join_seeds(c.training.seeds); },
                 [](R& c, std::string_view v) { c.training.seeds = parse_seeds(v); }});
    t.push_back(size_key("training.eval_steps", &R::training, &TrainingConfig::eval_steps));

    t.push_back({"output.dir", [](const R& c) { return c.output.dir; },
                 [](R& c, std::string_view v) { c.output.dir = std::string(v); }});
    t.push_back(bool_key("output.checkpoint", &R::output, &OutputConfig::checkpoint));
    return t;
  }();
  return table;
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string join_keys(const std::vector<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) out += (out.empty() ? "" : ", ") + k;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string message, std::vector<std::string> keys)
    : std::invalid_argument(std::move(message)), keys_(std::move(keys)) {}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

void RunConfig::validate() const {
  std::vector<std::string> bad;
  std::string detail;
  auto guard = [&](const std::function<void()>& fn, const char* fallback_key) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      const std::string head = what.substr(0, what.find_first_of(": "));
      bad.push_back(head.find('.') != std::string::npos ? head : std::string(fallback_key));
      detail += (detail.empty() ? "" : "; ") + what;
    }
  };
  guard([&] { env.validate(); }, "env");
  guard([&] { agent.validate(); }, "agent");
  auto check = [&](bool ok, const char* key, const char* message) {
    if (!ok) {
      bad.emplace_back(key);
      detail += (detail.empty() ? "" : "; ") + std::string(key) + ": " + message;
    }
  };
  check(training.steps >= 1, "training.steps", "must be at least 1");
  check(training.window >= 1, "training.window", "must be at least 1");
  check(!training.seeds.empty(), "training.seeds", "must list at least one seed");
  check(training.eval_steps >= 1, "training.eval_steps", "must be at least 1");
  check(!output.dir.empty(), "output.dir", "must not be empty");
  if (!bad.empty()) throw ConfigError("invalid configuration: " + detail, bad);
}

RunConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("malformed configuration: " + e.message() + " at line " + std::to_string(e.line()), {});
  }
  RunConfig config;
  std::vector<std::string> unknown;
  std::vector<std::string> invalid;
  std::string detail;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      unknown.push_back(section);
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const KeySpec* spec = find_key(full);
      if (!spec) {
        unknown.push_back(full);
        continue;
      }
      try {
        spec->set(config, trim(value.data()));
      } catch (const std::exception& e) {
        invalid.push_back(full);
        detail += (detail.empty() ? "" : "; ") + full + ": " + e.what();
      }
    }
  }
  if (!unknown.empty() || !invalid.empty()) {
    std::string message;
    if (!unknown.empty()) message = "unknown keys: " + join_keys(unknown);
    if (!invalid.empty()) message += (message.empty() ? "" : "; ") + std::string("invalid values: ") + detail;
    std::vector<std::string> keys = unknown;
    keys.insert(keys.end(), invalid.begin(), invalid.end());
    throw ConfigError(message, keys);
  }
  config.validate();
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    const auto dot = k.name.find('.');
    const auto sec = k.name.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += k.name.substr(dot + 1) + " = " + k.get(config) + "\n";
  }
  return out;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown key: " + std::string(key), {std::string(key)});
  try {
    spec->set(config, trim(value));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what(), {std::string(key)});
  }
}

std::string get_config_value(const RunConfig& config, std::string_view key) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown key: " + std::string(key), {std::string(key)});
  return spec->get(config);
}

std::string run_id(const RunConfig& config, std::span<const std::uint64_t> seeds) {
  std::string text = serialize_config(config) + "seeds=";
  for (auto s : seeds) text += std::to_string(s) + ",";
  return hash_id(text);
}

std::string hash_id(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(h & 0xffffffffffffull));
  return buf;
}

}  // namespace itema2c
