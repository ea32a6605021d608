#pragma once

// Run configuration for the command-line tool: "key = value" lines, '#'
// comments. Every key has a default except `game`.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tspg/evaluation.hpp"
#include "tspg/training.hpp"

namespace tspg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  TrainConfig train;
  std::string out = "runs/default";

  // Agent descriptions, see make_agent.
  std::string agent_a = "policy:tspg";
  std::string agent_b = "policy:ce";
  int eval_games = 40;
  int eval_iterations = 1600;
  double uct_exploration = 1.4142135623730951;
  bool greedy = true;
  double confidence = 0.95;
  int bootstrap_resamples = 10000;
  int threads = 1;
  int entropy_bins = 20;
  bool search_log = false;
};

std::vector<std::string> config_keys();

// Throws ConfigError on an unknown key or an unparsable value.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

// Errors carry "line N:" prefixes. Keys missing from `text` keep their
// current values in `base`.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});

// Throws ConfigError naming the first missing or invalid key.
void validate_run_config(const RunConfig& cfg);

// Every key with its resolved value, one "key = value" line each; parsing the
// result reproduces `cfg` exactly.
std::string describe(const RunConfig& cfg);

// Agent descriptions:
//   policy:ce | policy:tspg | policy:ce_double   raw softmax policy from `ck`
//   policy:uniform                               uniformly random moves
//   mcts:<prior>[/<playout>]                     Biased MCTS, prior and play-out
//                                                policies named as above
//   uct                                          UCB1 with random play-outs
//   minimax                                      exact solver (tiny games only)
// Throws ConfigError for unknown descriptions or policies absent from `ck`.
AgentSpec make_agent(std::string_view description, const Checkpoint* ck, const RunConfig& cfg);

}  // namespace tspg
