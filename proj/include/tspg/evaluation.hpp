#pragma once

// Head-to-head matches between agents, plus the statistics reported on them:
// bootstrap confidence intervals, normalized-entropy profiles over game time,
// and summaries of trained weight distributions.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tspg/features.hpp"
#include "tspg/game.hpp"
#include "tspg/policy.hpp"
#include "tspg/search.hpp"
#include "tspg/training.hpp"

namespace tspg {

// Plays straight from a softmax policy: argmax, or a sample when !greedy.
struct RawPolicyAgent {
  PolicySpec policy;
  FeatureSet features;
  bool greedy = true;
};

// MCTS that plays the most-visited root action. With a prior this is Biased
// MCTS (PUCT); without one and with UCB1 selection and no play-out policy it
// is plain UCT.
struct MctsAgent {
  std::optional<PolicySpec> prior;
  FeatureSet features;
  SearchConfig search;
};

// Uniformly random among game-theoretically optimal moves.
struct MinimaxAgent {};

using AgentSpec = std::variant<RawPolicyAgent, MctsAgent, MinimaxAgent>;

RawPolicyAgent uniform_random_agent();
MctsAgent uct_agent(int iterations, double exploration = 1.4142135623730951);
MctsAgent biased_mcts_agent(PolicySpec prior, std::optional<PolicySpec> playout,
                            FeatureSet features, int iterations, double exploration = 2.5);

// A policy whose distribution is recorded at every state of every game,
// without taking part in play.
struct Observer {
  std::string label;
  PolicySpec policy;
  FeatureSet features;
};

struct MoveRecord {
  int turn = 0;
  int actor = 0;  // 0 = agent a, 1 = agent b
  std::size_t chosen = 0;
  std::vector<double> distribution;
  std::vector<std::vector<double>> observed;  // one per observer
};

struct MatchGame {
  bool a_is_p1 = true;
  int length = 0;
  int winner = -1;  // 0 = a, 1 = b, -1 = draw
  std::vector<MoveRecord> moves;
};

struct MatchResult {
  int games = 0;
  int wins_a = 0;
  int wins_b = 0;
  int draws = 0;
  std::vector<MatchGame> records;
  std::vector<std::string> observer_labels;

  // 100 * (wins + draws / 2) / games.
  double win_percentage_a() const;
  double win_percentage_b() const;
};

struct MatchOptions {
  int move_cap = 150;
  std::vector<Observer> observers;
  int threads = 1;
  bool record_moves = true;
};

// Agent a is P1 in even-indexed games. Games 2k and 2k + 1 share one random
// stream derived from (seed, k), so identical agents split every pair evenly;
// results do not depend on `options.threads`. Throws std::invalid_argument
// when n_games < 1.
MatchResult play_match(const AgentSpec& a, const AgentSpec& b, const Game& game, int n_games,
                       std::uint64_t seed, const MatchOptions& options = {});

// Percentile bootstrap of the mean. Quantiles interpolate linearly between
// order statistics. Throws std::invalid_argument on empty input.
std::pair<double, double> bootstrap_ci(std::span<const double> estimates, double confidence,
                                       int resamples, Rng& rng);

// (-sum p ln p) / ln n, or 0 when n = 1.
double normalized_entropy(std::span<const double> probabilities);

struct EntropySample {
  double game_time = 0.0;  // turn / game length, in [0, 1)
  double entropy = 0.0;
};

struct EntropyBin {
  double center = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

struct EntropyProfile {
  std::vector<EntropyBin> bins;  // empty bins omitted
};

EntropyProfile entropy_profile(std::span<const EntropySample> samples, int bins = 20);
// Samples from the distributions agent `actor` (0 = a, 1 = b) acted on.
std::vector<EntropySample> actor_entropy_samples(const MatchResult& match, int actor);
std::vector<EntropySample> observer_entropy_samples(const MatchResult& match, std::size_t observer);

struct WeightSummary {
  std::string label;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double near_zero_fraction = 0.0;  // |value| < 0.01
};

struct WeightExport {
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::vector<WeightSummary> summaries;

  // "objective,value" rows.
  std::string csv() const;
  // One line per series, plus the standard deviation ratio when both exist.
  std::string summary_text() const;
};

WeightSummary summarize_weights(std::string label, std::span<const double> values);
// Series "ce" and, when offsets were trained, "ce+tspg".
WeightExport weight_distribution_export(const Checkpoint& ck);

}  // namespace tspg
