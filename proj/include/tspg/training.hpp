#pragma once

// Self-play Expert Iteration.
//
// Every turn a PUCT search (biased by the cross-entropy policy) is run from
// the current state, the tuple <s, M_s, Q_s> is stored, one mini-batch update
// is applied per trained parameter vector (cross-entropy vectors first), and
// the move is sampled from the visit distribution. After every game one
// feature is added and all vectors grow with zeros.

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tspg/experience.hpp"
#include "tspg/features.hpp"
#include "tspg/game.hpp"
#include "tspg/policy.hpp"
#include "tspg/search.hpp"

namespace tspg {

enum class PlayoutSource { kUniform, kCe, kTspg, kCeDouble };
std::string_view playout_source_name(PlayoutSource s);
PlayoutSource parse_playout_source(std::string_view name);

struct TrainConfig {
  std::string game;
  GameOptions game_options;
  int games = 200;
  int mcts_iterations = 1600;
  double exploration = 2.5;
  int batch_size = 30;
  double learning_rate = 0.005;
  double rms_decay = 0.9;
  double momentum = 0.9;
  double epsilon = 1e-8;
  int buffer_capacity = 400;
  int move_cap = 150;
  int playout_cap = 200;
  double gamma = 1.0;
  std::vector<int> checkpoints = {1, 25, 50, 100, 200};
  bool train_tspg = true;
  bool train_ce_double = true;
  PlayoutSource playout = PlayoutSource::kCe;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  // Configured indices within [1, games], plus the final game.
  std::vector<int> resolved_checkpoints() const;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 400);

  // Evicts the oldest entry when full.
  void push(ExperienceEntry entry);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const ExperienceEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<ExperienceEntry>& entries() const { return entries_; }

  // min(n, size()) distinct entries, uniformly at random.
  std::vector<const ExperienceEntry*> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<ExperienceEntry> entries_;
};

struct RmsPropConfig {
  double learning_rate = 0.005;
  double decay = 0.9;
  double momentum = 0.9;
  double epsilon = 1e-8;
};

struct RmsPropState {
  std::vector<double> mean_square;
  std::vector<double> mean;
  std::vector<double> velocity;

  void extend_to(std::size_t size);
  bool operator==(const RmsPropState&) const = default;
};

// Centered RMSProp with momentum, descent form:
//   ms <- rho ms + (1 - rho) g^2;  m <- rho m + (1 - rho) g
//   v  <- mu v + lr g / sqrt(ms - m^2 + eps);  theta <- theta - v
// Ascent objectives pass the negated gradient. Throws std::invalid_argument
// (leaving everything untouched) on a non-finite or mis-sized gradient.
void rmsprop_update(ParameterVector& params, std::span<const double> grad, RmsPropState& state,
                    const RmsPropConfig& cfg);

struct TrainedParameters {
  ParameterVector ce;
  std::optional<ParameterVector> tspg;       // offsets on top of ce
  std::optional<ParameterVector> ce_double;  // offsets on top of ce, cross-entropy trained

  PolicySpec ce_policy() const { return {ce, std::nullopt}; }
  // Falls back to ce alone when the offsets are absent.
  PolicySpec tspg_policy() const { return {ce, tspg}; }
  PolicySpec ce_double_policy() const { return {ce, ce_double}; }
  void extend_to(std::size_t size);
  bool operator==(const TrainedParameters&) const = default;
};

struct LearnerState {
  TrainedParameters params;
  RmsPropState ce_opt;
  RmsPropState tspg_opt;
  RmsPropState double_opt;
  std::int64_t update_steps = 0;

  void extend_to(std::size_t size);
};

struct SelfPlayRecord {
  int length = 0;
  Outcome result;
  bool capped = false;
  std::vector<Action> moves;
  double mean_abs_grad_ce = 0.0;
  double mean_abs_grad_tspg = 0.0;
  double mean_abs_grad_double = 0.0;
};

// Plays one game of self-play, storing every encountered state in `buffer`
// (and `game_entries` when given) and updating `learner` after every turn.
SelfPlayRecord self_play_game(const Game& game, LearnerState& learner, const FeatureSet& features,
                              const TrainConfig& cfg, ReplayBuffer& buffer, Rng& rng,
                              std::vector<ExperienceEntry>* game_entries = nullptr,
                              std::ostream* search_log = nullptr);

struct Checkpoint {
  std::string game_id;
  GameOptions game_options;
  int games_played = 0;
  std::int64_t update_steps = 0;
  FeatureSet features;
  TrainedParameters params;
};

struct TrainHooks {
  std::function<void(const Checkpoint&)> on_checkpoint;
  // CSV: game,length,result_p1,buffer_size,features,mean_abs_grad_ce,
  //      mean_abs_grad_tspg,mean_abs_grad_double
  std::ostream* log = nullptr;
  std::ostream* search_log = nullptr;
};

std::string_view training_log_header();

std::vector<Checkpoint> train(const TrainConfig& cfg, const TrainHooks& hooks = {});

}  // namespace tspg
