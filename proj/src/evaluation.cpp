#include "tspg/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <thread>

#include "tspg/minimax.hpp"

namespace tspg {
namespace {

struct Decision {
  std::size_t index = 0;
  std::vector<double> distribution;
};

class Actor {
 public:
  virtual ~Actor() = default;
  virtual Decision act(const GameState& state, const std::vector<Action>& actions, Rng& rng) = 0;
  // Called after every move, by either side.
  virtual void observe(Action) {}
};

std::vector<double> fitted_weights(const PolicySpec& policy, const FeatureSet& features) {
  if (policy.dimension() < static_cast<std::size_t>(features.size())) {
    throw std::invalid_argument("policy has fewer weights than its feature set");
  }
  return policy.effective_weights();
}

class SoftmaxScorer {
 public:
  SoftmaxScorer(const Game& game, const PolicySpec& policy, const FeatureSet& features)
      : evaluator_(game, features), weights_(fitted_weights(policy, features)) {}

  ActionDistribution operator()(const GameState& state, const std::vector<Action>& actions) {
    z_.resize(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
      z_[i] = logit(weights_, evaluator_.active(state, actions[i]));
    }
    return softmax(z_);
  }

 private:
  FeatureEvaluator evaluator_;
  std::vector<double> weights_;
  std::vector<double> z_;
};

class RawPolicyActor : public Actor {
 public:
  RawPolicyActor(const Game& game, const RawPolicyAgent& spec)
      : scorer_(game, spec.policy, spec.features), greedy_(spec.greedy) {}

  Decision act(const GameState& state, const std::vector<Action>& actions, Rng& rng) override {
    ActionDistribution pi = scorer_(state, actions);
    const std::size_t pick = greedy_ ? greedy_action(pi) : sample_action(pi, rng);
    return {pick, std::move(pi.probabilities)};
  }

 private:
  SoftmaxScorer scorer_;
  bool greedy_;
};

class MctsActor : public Actor {
 public:
  MctsActor(const Game& game, const MctsAgent& spec)
      : game_(game), spec_(spec), evaluator_(game, spec.features) {}

  Decision act(const GameState& state, const std::vector<Action>&, Rng& rng) override {
    const PolicySpec* prior = spec_.prior ? &*spec_.prior : nullptr;
    SearchResult r =
        run_search(game_, state, spec_.features, prior, spec_.search, std::move(tree_), rng,
                   &evaluator_);
    tree_ = std::move(r.tree);
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.visit_counts.size(); ++i)
      if (r.visit_counts[i] > r.visit_counts[best]) best = i;
    return {best, std::move(r.visit_distribution.probabilities)};
  }

  void observe(Action a) override { tree_ = child_subtree(std::move(tree_), a); }

 private:
  const Game& game_;
  const MctsAgent& spec_;
  FeatureEvaluator evaluator_;
  SearchTree tree_;
};

class MinimaxActor : public Actor {
 public:
  explicit MinimaxActor(const Game& game) : solver_(game) {}

  Decision act(const GameState& state, const std::vector<Action>& actions, Rng& rng) override {
    const auto best = solver_.optimal_actions(state);
    std::vector<double> d(actions.size(), 0.0);
    for (std::size_t i : best) d[i] = 1.0 / static_cast<double>(best.size());
    std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
    return {best[pick(rng)], std::move(d)};
  }

 private:
  MinimaxSolver solver_;
};

std::unique_ptr<Actor> make_actor(const Game& game, const AgentSpec& spec) {
  struct Visitor {
    const Game& game;
    std::unique_ptr<Actor> operator()(const RawPolicyAgent& s) const {
      return std::make_unique<RawPolicyActor>(game, s);
    }
    std::unique_ptr<Actor> operator()(const MctsAgent& s) const {
      return std::make_unique<MctsActor>(game, s);
    }
    std::unique_ptr<Actor> operator()(const MinimaxAgent&) const {
      return std::make_unique<MinimaxActor>(game);
    }
  };
  return std::visit(Visitor{game}, spec);
}

Rng pair_stream(std::uint64_t seed, int game_index) {
  const auto pair = static_cast<std::uint32_t>(game_index / 2);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    pair};
  return Rng(seq);
}

MatchGame play_one(const AgentSpec& a, const AgentSpec& b, const Game& game, int index,
                   std::uint64_t seed, const MatchOptions& options) {
  MatchGame rec;
  rec.a_is_p1 = index % 2 == 0;
  Rng rng = pair_stream(seed, index);
  std::unique_ptr<Actor> actors[2] = {make_actor(game, a), make_actor(game, b)};
  std::vector<SoftmaxScorer> observers;
  for (const auto& o : options.observers) observers.emplace_back(game, o.policy, o.features);

  GameState state = game.initial_state();
  while (!state.is_terminal() && rec.length < options.move_cap) {
    const std::vector<Action> actions = game.legal_actions(state);
    const bool p1_to_move = state.mover() == Player::kP1;
    const int actor = p1_to_move == rec.a_is_p1 ? 0 : 1;
    Decision d = actors[actor]->act(state, actions, rng);
    if (options.record_moves) {
      MoveRecord m;
      m.turn = rec.length;
      m.actor = actor;
      m.chosen = d.index;
      m.distribution = std::move(d.distribution);
      for (auto& o : observers) m.observed.push_back(o(state, actions).probabilities);
      rec.moves.push_back(std::move(m));
    }
    const Action move = actions[d.index];
    for (auto& ac : actors) ac->observe(move);
    state = game.apply_unchecked(state, move);
    ++rec.length;
  }
  if (state.is_terminal() && state.outcome()->utility_p1 != 0) {
    const bool p1_won = state.outcome()->utility_p1 > 0;
    rec.winner = p1_won == rec.a_is_p1 ? 0 : 1;
  }
  return rec;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::string fmt9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

RawPolicyAgent uniform_random_agent() { return {PolicySpec{}, FeatureSet{}, false}; }

MctsAgent uct_agent(int iterations, double exploration) {
  MctsAgent agent;
  agent.search.iterations = iterations;
  agent.search.exploration = exploration;
  agent.search.selection = SelectionRule::kUcb1;
  return agent;
}

MctsAgent biased_mcts_agent(PolicySpec prior, std::optional<PolicySpec> playout,
                            FeatureSet features, int iterations, double exploration) {
  MctsAgent agent;
  agent.prior = std::move(prior);
  agent.features = std::move(features);
  agent.search.iterations = iterations;
  agent.search.exploration = exploration;
  agent.search.selection = SelectionRule::kPuct;
  agent.search.playout_policy = std::move(playout);
  return agent;
}

double MatchResult::win_percentage_a() const {
  return games > 0 ? 100.0 * (wins_a + 0.5 * draws) / games : 0.0;
}

double MatchResult::win_percentage_b() const {
  return games > 0 ? 100.0 * (wins_b + 0.5 * draws) / games : 0.0;
}

MatchResult play_match(const AgentSpec& a, const AgentSpec& b, const Game& game, int n_games,
                       std::uint64_t seed, const MatchOptions& options) {
  if (n_games < 1) throw std::invalid_argument("a match needs at least one game");
  MatchResult result;
  result.games = n_games;
  result.records.resize(static_cast<std::size_t>(n_games));
  for (const auto& o : options.observers) result.observer_labels.push_back(o.label);

  const int threads = std::clamp(options.threads, 1, n_games);
  if (threads == 1) {
    for (int i = 0; i < n_games; ++i) result.records[i] = play_one(a, b, game, i, seed, options);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < n_games && !failed; i = next++) {
          try {
            result.records[i] = play_one(a, b, game, i, seed, options);
          } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  for (const auto& r : result.records) {
    if (r.winner == 0) ++result.wins_a;
    else if (r.winner == 1) ++result.wins_b;
    else ++result.draws;
  }
  return result;
}

std::pair<double, double> bootstrap_ci(std::span<const double> estimates, double confidence,
                                       int resamples, Rng& rng) {
  if (estimates.empty()) throw std::invalid_argument("bootstrap needs at least one estimate");
  if (resamples < 1) throw std::invalid_argument("bootstrap needs at least one resample");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  const std::size_t n = estimates.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (double& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += estimates[pick(rng)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  return {quantile(means, tail), quantile(means, 1.0 - tail)};
}

double normalized_entropy(std::span<const double> probabilities) {
  if (probabilities.size() <= 1) return 0.0;
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log(p);
  return std::clamp(h / std::log(static_cast<double>(probabilities.size())), 0.0, 1.0);
}

EntropyProfile entropy_profile(std::span<const EntropySample> samples, int bins) {
  if (bins < 1) throw std::invalid_argument("entropy profile needs at least one bin");
  std::vector<double> sum(static_cast<std::size_t>(bins), 0.0), sum_sq(sum);
  std::vector<int> count(static_cast<std::size_t>(bins), 0);
  for (const auto& s : samples) {
    const int b = std::clamp(static_cast<int>(std::floor(s.game_time * bins)), 0, bins - 1);
    sum[b] += s.entropy;
    sum_sq[b] += s.entropy * s.entropy;
    ++count[b];
  }
  EntropyProfile profile;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    EntropyBin bin;
    bin.center = (b + 0.5) / bins;
    bin.count = count[b];
    bin.mean = sum[b] / count[b];
    bin.stddev = std::sqrt(std::max(sum_sq[b] / count[b] - bin.mean * bin.mean, 0.0));
    profile.bins.push_back(bin);
  }
  return profile;
}

std::vector<EntropySample> actor_entropy_samples(const MatchResult& match, int actor) {
  std::vector<EntropySample> out;
  for (const auto& g : match.records) {
    for (const auto& m : g.moves) {
      if (m.actor != actor) continue;
      out.push_back({static_cast<double>(m.turn) / g.length, normalized_entropy(m.distribution)});
    }
  }
  return out;
}

std::vector<EntropySample> observer_entropy_samples(const MatchResult& match,
                                                    std::size_t observer) {
  std::vector<EntropySample> out;
  for (const auto& g : match.records) {
    for (const auto& m : g.moves) {
      if (observer >= m.observed.size()) continue;
      out.push_back(
          {static_cast<double>(m.turn) / g.length, normalized_entropy(m.observed[observer])});
    }
  }
  return out;
}

WeightSummary summarize_weights(std::string label, std::span<const double> values) {
  WeightSummary s;
  s.label = std::move(label);
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  std::size_t near_zero = 0;
  for (double v : values) {
    sum += v;
    if (std::abs(v) < 0.01) ++near_zero;
  }
  s.mean = sum / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / values.size());
  s.near_zero_fraction = static_cast<double>(near_zero) / values.size();
  return s;
}

std::string WeightExport::csv() const {
  std::string out = "objective,value\n";
  for (const auto& [label, values] : series) {
    for (double v : values) out += label + "," + fmt9(v) + "\n";
  }
  return out;
}

std::string WeightExport::summary_text() const {
  std::string out;
  for (const auto& s : summaries) {
    out += s.label + ": count=" + std::to_string(s.count) + " mean=" + fmt9(s.mean) +
           " std=" + fmt9(s.stddev) + " near_zero_fraction=" + fmt9(s.near_zero_fraction) + "\n";
  }
  if (summaries.size() >= 2 && summaries[0].stddev > 0.0) {
    out += "std_ratio(" + summaries[1].label + "/" + summaries[0].label +
           ")=" + fmt9(summaries[1].stddev / summaries[0].stddev) + "\n";
  }
  return out;
}

WeightExport weight_distribution_export(const Checkpoint& ck) {
  WeightExport ex;
  const auto ce = ck.params.ce.values();
  ex.series.emplace_back("ce", std::vector<double>(ce.begin(), ce.end()));
  if (ck.params.tspg) {
    ex.series.emplace_back("ce+tspg", ck.params.tspg_policy().effective_weights());
  }
  for (const auto& [label, values] : ex.series) ex.summaries.push_back(summarize_weights(label, values));
  return ex;
}

}  // namespace tspg
