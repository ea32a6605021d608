#include "tspg/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tspg {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) +
                    " (expected " + expected + ")");
}

int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') bad_value(key, v, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    std::size_t end = v.find(',', start);
    if (end == std::string_view::npos) end = v.size();
    const auto item = trim(v.substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field int_field(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_int(k, v);
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field train_int(int TrainConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            c.train.*member = parse_int(k, v);
          },
          [member](const RunConfig& c) { return std::to_string(c.train.*member); }};
}

Field train_double(double TrainConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            c.train.*member = parse_double(k, v);
          },
          [member](const RunConfig& c) { return fmt_double(c.train.*member); }};
}

Field run_double(double RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_double(k, v);
          },
          [member](const RunConfig& c) { return fmt_double(c.*member); }};
}

Field run_bool(bool RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_bool(k, v);
          },
          [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field run_string(std::string RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view, std::string_view v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"game",
       {[](RunConfig& c, std::string_view, std::string_view v) { c.train.game = v; },
        [](const RunConfig& c) { return c.train.game; }}},
      {"hex_size",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.game_options.hex_size = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.train.game_options.hex_size); }}},
      {"seed",
       {[](RunConfig& c, std::string_view k, std::string_view v) { c.train.seed = parse_u64(k, v); },
        [](const RunConfig& c) { return std::to_string(c.train.seed); }}},
      {"out", run_string(&RunConfig::out)},
      {"games", train_int(&TrainConfig::games)},
      {"iterations", train_int(&TrainConfig::mcts_iterations)},
      {"exploration", train_double(&TrainConfig::exploration)},
      {"batch_size", train_int(&TrainConfig::batch_size)},
      {"learning_rate", train_double(&TrainConfig::learning_rate)},
      {"rms_decay", train_double(&TrainConfig::rms_decay)},
      {"momentum", train_double(&TrainConfig::momentum)},
      {"epsilon", train_double(&TrainConfig::epsilon)},
      {"buffer_capacity", train_int(&TrainConfig::buffer_capacity)},
      {"move_cap", train_int(&TrainConfig::move_cap)},
      {"playout_cap", train_int(&TrainConfig::playout_cap)},
      {"gamma", train_double(&TrainConfig::gamma)},
      {"checkpoints",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          std::vector<int> out;
          for (auto item : split_list(v)) out.push_back(parse_int(k, item));
          if (out.empty()) bad_value(k, v, "a comma-separated list of game indices");
          c.train.checkpoints = out;
        },
        [](const RunConfig& c) {
          std::string s;
          for (int x : c.train.checkpoints) s += (s.empty() ? "" : ",") + std::to_string(x);
          return s;
        }}},
      {"objectives",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          bool ce = false, tspg = false, dbl = false;
          for (auto item : split_list(v)) {
            if (item == "ce") ce = true;
            else if (item == "tspg") tspg = true;
            else if (item == "ce_double") dbl = true;
            else bad_value(k, v, "a list drawn from ce, tspg, ce_double");
          }
          if (!ce) bad_value(k, v, "a list that includes ce");
          c.train.train_tspg = tspg;
          c.train.train_ce_double = dbl;
        },
        [](const RunConfig& c) {
          std::string s = "ce";
          if (c.train.train_tspg) s += ",tspg";
          if (c.train.train_ce_double) s += ",ce_double";
          return s;
        }}},
      {"playout_policy",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          try {
            c.train.playout = parse_playout_source(v);
          } catch (const std::invalid_argument&) {
            bad_value(k, v, "uniform, ce, tspg or ce_double");
          }
        },
        [](const RunConfig& c) { return std::string(playout_source_name(c.train.playout)); }}},
      {"agent_a", run_string(&RunConfig::agent_a)},
      {"agent_b", run_string(&RunConfig::agent_b)},
      {"eval_games", int_field(&RunConfig::eval_games)},
      {"eval_iterations", int_field(&RunConfig::eval_iterations)},
      {"uct_exploration", run_double(&RunConfig::uct_exploration)},
      {"greedy", run_bool(&RunConfig::greedy)},
      {"confidence", run_double(&RunConfig::confidence)},
      {"bootstrap_resamples", int_field(&RunConfig::bootstrap_resamples)},
      {"threads", int_field(&RunConfig::threads)},
      {"entropy_bins", int_field(&RunConfig::entropy_bins)},
      {"search_log", run_bool(&RunConfig::search_log)},
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& [name, field] : fields())
    if (name == key) return &field;
  return nullptr;
}

PolicySpec named_policy(std::string_view name, const Checkpoint* ck, std::string_view description) {
  if (!ck) {
    throw ConfigError("agent '" + std::string(description) + "' needs a checkpoint");
  }
  if (name == "ce") return ck->params.ce_policy();
  if (name == "tspg") {
    if (!ck->params.tspg) throw ConfigError("checkpoint has no tspg weights");
    return ck->params.tspg_policy();
  }
  if (name == "ce_double") {
    if (!ck->params.ce_double) throw ConfigError("checkpoint has no ce_double weights");
    return ck->params.ce_double_policy();
  }
  throw ConfigError("unknown policy '" + std::string(name) + "' in agent '" +
                    std::string(description) + "'");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : fields()) keys.push_back(name);
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown key '" + std::string(key) + "'");
  f->set(cfg, key, value);
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string prefix = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(prefix + "expected 'key = value'");
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(prefix + e.what());
    }
  }
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_run_config(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate_run_config(const RunConfig& cfg) {
  if (cfg.train.game.empty()) throw ConfigError("missing required key 'game'");
  try {
    cfg.train.validate();
    make_game(cfg.train.game, cfg.train.game_options);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.eval_games < 1) throw ConfigError("eval_games must be at least 1");
  if (cfg.eval_iterations < 1) throw ConfigError("eval_iterations must be at least 1");
  if (!(cfg.uct_exploration > 0)) throw ConfigError("uct_exploration must be positive");
  if (!(cfg.confidence > 0 && cfg.confidence < 1)) throw ConfigError("confidence must lie in (0, 1)");
  if (cfg.bootstrap_resamples < 1) throw ConfigError("bootstrap_resamples must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.entropy_bins < 1) throw ConfigError("entropy_bins must be at least 1");
  if (cfg.out.empty()) throw ConfigError("out must not be empty");
}

std::string describe(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, field] : fields()) out += name + " = " + field.get(cfg) + "\n";
  return out;
}

AgentSpec make_agent(std::string_view description, const Checkpoint* ck, const RunConfig& cfg) {
  const auto colon = description.find(':');
  const std::string_view kind = description.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : description.substr(colon + 1);

  if (kind == "uct" && arg.empty()) return uct_agent(cfg.eval_iterations, cfg.uct_exploration);
  if (kind == "minimax" && arg.empty()) return MinimaxAgent{};
  if (kind == "policy" && arg == "uniform") return uniform_random_agent();
  if (kind == "policy" && !arg.empty()) {
    return RawPolicyAgent{named_policy(arg, ck, description), ck->features, cfg.greedy};
  }
  if (kind == "mcts" && !arg.empty()) {
    const auto slash = arg.find('/');
    const std::string_view prior_name = arg.substr(0, slash);
    std::optional<PolicySpec> playout;
    if (slash != std::string_view::npos) {
      const std::string_view playout_name = arg.substr(slash + 1);
      if (playout_name != "uniform") playout = named_policy(playout_name, ck, description);
    }
    return biased_mcts_agent(named_policy(prior_name, ck, description), std::move(playout),
                             ck->features, cfg.eval_iterations, cfg.train.exploration);
  }
  throw ConfigError("unknown agent '" + std::string(description) +
                    "' (expected policy:<name>, mcts:<prior>[/<playout>], uct or minimax)");
}

}  // namespace tspg
