#include "tspg/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "tspg/feature_growth.hpp"

namespace tspg {
namespace {

double mean_abs(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s / static_cast<double>(v.size());
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

RmsPropConfig optimizer_config(const TrainConfig& cfg) {
  return {cfg.learning_rate, cfg.rms_decay, cfg.momentum, cfg.epsilon};
}

std::vector<double> negated(std::vector<double> g) {
  for (double& x : g) x = -x;
  return g;
}

}  // namespace

std::string_view playout_source_name(PlayoutSource s) {
  switch (s) {
    case PlayoutSource::kUniform: return "uniform";
    case PlayoutSource::kCe: return "ce";
    case PlayoutSource::kTspg: return "tspg";
    case PlayoutSource::kCeDouble: return "ce_double";
  }
  return "?";
}

PlayoutSource parse_playout_source(std::string_view name) {
  for (auto s : {PlayoutSource::kUniform, PlayoutSource::kCe, PlayoutSource::kTspg,
                 PlayoutSource::kCeDouble}) {
    if (playout_source_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown play-out policy '" + std::string(name) +
                              "' (expected uniform, ce, tspg or ce_double)");
}

void TrainConfig::validate() const {
  if (game.empty()) throw std::invalid_argument("game is required");
  require_positive(games, "games");
  require_positive(mcts_iterations, "iterations");
  require_positive(exploration, "exploration");
  require_positive(batch_size, "batch_size");
  require_positive(learning_rate, "learning_rate");
  require_positive(rms_decay, "rms_decay");
  require_positive(momentum, "momentum");
  require_positive(epsilon, "epsilon");
  require_positive(buffer_capacity, "buffer_capacity");
  require_positive(move_cap, "move_cap");
  require_positive(playout_cap, "playout_cap");
  require_positive(game_options.hex_size, "hex_size");
  if (rms_decay >= 1.0) throw std::invalid_argument("rms_decay must be below 1");
  if (momentum >= 1.0) throw std::invalid_argument("momentum must be below 1");
  if (gamma != 1.0) throw std::invalid_argument("gamma: only 1 is supported");
  for (int c : checkpoints) {
    if (c < 1) throw std::invalid_argument("checkpoints must be positive");
  }
  if (playout == PlayoutSource::kTspg && !train_tspg) {
    throw std::invalid_argument("playout_policy tspg requires the tspg objective");
  }
  if (playout == PlayoutSource::kCeDouble && !train_ce_double) {
    throw std::invalid_argument("playout_policy ce_double requires the ce_double objective");
  }
}

std::vector<int> TrainConfig::resolved_checkpoints() const {
  std::set<int> out;
  for (int c : checkpoints)
    if (c >= 1 && c <= games) out.insert(c);
  out.insert(games);
  return {out.begin(), out.end()};
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::push(ExperienceEntry entry) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(entry));
}

std::vector<const ExperienceEntry*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<std::size_t> idx(entries_.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t k = std::min(n, idx.size());
  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<const ExperienceEntry*> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(&entries_[idx[i]]);
  return out;
}

void RmsPropState::extend_to(std::size_t size) {
  if (mean_square.size() < size) mean_square.resize(size, 0.0);
  if (mean.size() < size) mean.resize(size, 0.0);
  if (velocity.size() < size) velocity.resize(size, 0.0);
}

void rmsprop_update(ParameterVector& params, std::span<const double> grad, RmsPropState& state,
                    const RmsPropConfig& cfg) {
  if (grad.size() != params.size()) {
    throw std::invalid_argument("gradient has " + std::to_string(grad.size()) +
                                " coordinates, parameters have " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw std::invalid_argument("non-finite gradient at coordinate " + std::to_string(i));
    }
  }
  state.extend_to(params.size());
  const double rho = cfg.decay;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    double& ms = state.mean_square[i];
    double& m = state.mean[i];
    double& v = state.velocity[i];
    ms = rho * ms + (1.0 - rho) * g * g;
    m = rho * m + (1.0 - rho) * g;
    // Rounding can push ms - m^2 a hair below zero.
    const double variance = std::max(ms - m * m, 0.0);
    v = cfg.momentum * v + cfg.learning_rate * g / std::sqrt(variance + cfg.epsilon);
    params[i] -= v;
  }
}

void TrainedParameters::extend_to(std::size_t size) {
  ce.extend_to(size);
  if (tspg) tspg->extend_to(size);
  if (ce_double) ce_double->extend_to(size);
}

void LearnerState::extend_to(std::size_t size) {
  params.extend_to(size);
  ce_opt.extend_to(size);
  if (params.tspg) tspg_opt.extend_to(size);
  if (params.ce_double) double_opt.extend_to(size);
}

SelfPlayRecord self_play_game(const Game& game, LearnerState& learner, const FeatureSet& features,
                              const TrainConfig& cfg, ReplayBuffer& buffer, Rng& rng,
                              std::vector<ExperienceEntry>* game_entries,
                              std::ostream* search_log) {
  learner.extend_to(static_cast<std::size_t>(features.size()));
  const RmsPropConfig opt = optimizer_config(cfg);
  FeatureEvaluator evaluator(game, features);

  SearchConfig search;
  search.iterations = cfg.mcts_iterations;
  search.exploration = cfg.exploration;
  search.selection = SelectionRule::kPuct;
  search.playout_cap = cfg.playout_cap;
  search.tree_reuse = true;

  SelfPlayRecord record;
  SearchTree tree;
  GameState state = game.initial_state();
  double grad_ce = 0.0, grad_tspg = 0.0, grad_double = 0.0;
  while (!state.is_terminal()) {
    if (record.length >= cfg.move_cap) {
      record.capped = true;
      break;
    }
    const TrainedParameters& p = learner.params;
    switch (cfg.playout) {
      case PlayoutSource::kUniform: search.playout_policy.reset(); break;
      case PlayoutSource::kCe: search.playout_policy = p.ce_policy(); break;
      case PlayoutSource::kTspg: search.playout_policy = p.tspg_policy(); break;
      case PlayoutSource::kCeDouble: search.playout_policy = p.ce_double_policy(); break;
    }
    const PolicySpec prior = p.ce_policy();
    SearchResult result =
        run_search(game, state, features, &prior, search, std::move(tree), rng, &evaluator);
    if (search_log) *search_log << search_log_line(record.length, result) << '\n';

    ExperienceEntry entry;
    entry.state = state;
    entry.actions = result.actions;
    entry.features.reserve(result.actions.size());
    for (Action a : result.actions) {
      const auto active = evaluator.active(state, a);
      entry.features.push_back({{active.begin(), active.end()}, features.size()});
    }
    entry.visit_distribution = result.visit_distribution;
    entry.q_values = result.q_estimates;
    entry.feature_version = features.version();
    if (game_entries) game_entries->push_back(entry);
    buffer.push(std::move(entry));

    const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
    const std::span<const ExperienceEntry* const> b(batch);
    TrainedParameters& q = learner.params;
    {
      const auto g = ce_gradient(q.ce_policy(), b);
      grad_ce += mean_abs(g);
      rmsprop_update(q.ce, g, learner.ce_opt, opt);
    }
    if (q.ce_double) {
      const auto g = ce_gradient(q.ce_double_policy(), b);
      grad_double += mean_abs(g);
      rmsprop_update(*q.ce_double, g, learner.double_opt, opt);
    }
    if (q.tspg) {
      const auto g = tspg_gradient(q.tspg_policy(), b);
      grad_tspg += mean_abs(g);
      rmsprop_update(*q.tspg, negated(g), learner.tspg_opt, opt);
    }
    ++learner.update_steps;

    const std::size_t pick = sample_action(result.visit_distribution, rng);
    const Action move = result.actions[pick];
    record.moves.push_back(move);
    state = game.apply_unchecked(state, move);
    ++record.length;
    tree = child_subtree(std::move(result.tree), move);
  }
  record.result = state.is_terminal() ? *state.outcome() : Outcome::draw();
  if (record.length > 0) {
    const double n = record.length;
    record.mean_abs_grad_ce = grad_ce / n;
    record.mean_abs_grad_tspg = grad_tspg / n;
    record.mean_abs_grad_double = grad_double / n;
  }
  return record;
}

std::string_view training_log_header() {
  return "game,length,result_p1,buffer_size,features,mean_abs_grad_ce,mean_abs_grad_tspg,"
         "mean_abs_grad_double";
}

std::vector<Checkpoint> train(const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  const auto game = make_game(cfg.game, cfg.game_options);
  FeatureSet features = atomic_features(*game);

  LearnerState learner;
  learner.params.ce = ParameterVector(static_cast<std::size_t>(features.size()));
  if (cfg.train_tspg) learner.params.tspg = ParameterVector(learner.params.ce.size());
  if (cfg.train_ce_double) learner.params.ce_double = ParameterVector(learner.params.ce.size());
  learner.extend_to(learner.params.ce.size());

  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  Rng rng(cfg.seed);
  const std::vector<int> marks = cfg.resolved_checkpoints();
  std::vector<Checkpoint> out;

  if (hooks.log) *hooks.log << training_log_header() << '\n';
  std::vector<ExperienceEntry> recent;
  for (int g = 1; g <= cfg.games; ++g) {
    recent.clear();
    const SelfPlayRecord rec =
        self_play_game(*game, learner, features, cfg, buffer, rng, &recent, hooks.search_log);
    features = grow(features, *game, recent);
    learner.extend_to(static_cast<std::size_t>(features.size()));

    if (hooks.log) {
      char line[256];
      std::snprintf(line, sizeof line, "%d,%d,%d,%zu,%d,%.9g,%.9g,%.9g", g, rec.length,
                    rec.result.utility_p1, buffer.size(), features.size(), rec.mean_abs_grad_ce,
                    rec.mean_abs_grad_tspg, rec.mean_abs_grad_double);
      *hooks.log << line << '\n';
    }
    if (std::binary_search(marks.begin(), marks.end(), g)) {
      Checkpoint ck{std::string(game->id()), cfg.game_options, g, learner.update_steps, features,
                    learner.params};
      if (hooks.on_checkpoint) hooks.on_checkpoint(ck);
      out.push_back(std::move(ck));
    }
  }
  return out;
}

}  // namespace tspg
