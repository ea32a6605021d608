#include "tspg/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace tspg {
namespace {

double mover_sign(Player p) { return p == Player::kP1 ? 1.0 : -1.0; }

// Index of the maximal score; lowest index on ties unless `rng` is given, in
// which case ties are broken uniformly.
template <class Score>
std::size_t argmax(std::size_t n, Score score, Rng* rng) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t ties = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = score(i);
    if (s > best_score) {
      best = i;
      best_score = s;
      ties = 1;
    } else if (rng && s == best_score) {
      ++ties;
      if (std::uniform_int_distribution<std::size_t>(0, ties - 1)(*rng) == 0) best = i;
    }
  }
  return best;
}

std::size_t puct_select_impl(std::span<const EdgeStats> edges, double parent_value, double c,
                             Rng* rng) {
  int total = 0;
  for (const auto& e : edges) total += e.visits;
  const double sqrt_total = std::sqrt(static_cast<double>(std::max(total, 1)));
  return argmax(
      edges.size(),
      [&](std::size_t i) {
        const EdgeStats& e = edges[i];
        const double q = e.visits > 0 ? e.value_sum / e.visits : parent_value;
        return q + c * e.prior * sqrt_total / (1.0 + e.visits);
      },
      rng);
}

std::size_t ucb1_select_impl(std::span<const EdgeStats> edges, double c, Rng* rng) {
  int total = 0;
  bool unvisited = false;
  for (const auto& e : edges) {
    total += e.visits;
    unvisited |= e.visits == 0;
  }
  if (unvisited) {
    return argmax(
        edges.size(), [&](std::size_t i) { return edges[i].visits == 0 ? 1.0 : 0.0; }, rng);
  }
  const double log_total = std::log(static_cast<double>(total));
  return argmax(
      edges.size(),
      [&](std::size_t i) {
        const EdgeStats& e = edges[i];
        return e.value_sum / e.visits + c * std::sqrt(log_total / e.visits);
      },
      rng);
}

std::vector<EdgeStats> stats_of(const SearchNode& node) {
  std::vector<EdgeStats> stats;
  stats.reserve(node.edges().size());
  for (const auto& e : node.edges()) stats.push_back(e.stats);
  return stats;
}

// Play-out returning the P1 utility.
double playout_p1(const Game& game, GameState state, std::span<const double> weights,
                  FeatureEvaluator* evaluator, int cap, Rng& rng) {
  std::vector<Action> actions;
  std::vector<double> z;
  for (int moves = 0; !state.is_terminal(); ++moves) {
    if (moves >= cap) return 0.0;
    actions = game.legal_actions(state);
    std::size_t pick;
    if (evaluator) {
      z.resize(actions.size());
      for (std::size_t i = 0; i < actions.size(); ++i) {
        z[i] = logit(weights, evaluator->active(state, actions[i]));
      }
      pick = sample_action(softmax(z), rng);
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, actions.size() - 1)(rng);
    }
    state = game.apply_unchecked(state, actions[pick]);
  }
  return state.outcome()->utility_p1;
}

}  // namespace

SearchNode::SearchNode(const Game& game, GameState state) : state_(std::move(state)) {
  if (!state_.is_terminal()) {
    for (Action a : game.legal_actions(state_)) edges_.push_back(Edge{a, {}, nullptr});
  }
}

int SearchNode::edge_visits() const {
  int total = 0;
  for (const auto& e : edges_) total += e.stats.visits;
  return total;
}

double SearchNode::value_estimate() const {
  int n = 0;
  double w = 0.0;
  for (const auto& e : edges_) {
    n += e.stats.visits;
    w += e.stats.value_sum;
  }
  return n > 0 ? w / n : 0.0;
}

std::optional<std::size_t> SearchNode::edge_index(Action action) const {
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].action == action) return i;
  return std::nullopt;
}

std::size_t puct_select(std::span<const EdgeStats> edges, double parent_value, double c) {
  return puct_select_impl(edges, parent_value, c, nullptr);
}

std::size_t ucb1_select(std::span<const EdgeStats> edges, double c) {
  return ucb1_select_impl(edges, c, nullptr);
}

std::size_t puct_select(const SearchNode& node, double c) {
  return puct_select(stats_of(node), node.value_estimate(), c);
}

std::size_t ucb1_select(const SearchNode& node, double c) { return ucb1_select(stats_of(node), c); }

ActionDistribution visit_distribution(const SearchNode& node) {
  const int total = node.edge_visits();
  if (total <= 0) throw ContractViolation("visit distribution of an unvisited node");
  ActionDistribution d;
  for (const auto& e : node.edges()) {
    d.probabilities.push_back(static_cast<double>(e.stats.visits) / total);
  }
  return d;
}

std::vector<double> q_estimates(const SearchNode& node) {
  const double v = node.value_estimate();
  std::vector<double> q;
  for (const auto& e : node.edges()) {
    q.push_back(e.stats.visits > 0 ? e.stats.value_sum / e.stats.visits : v);
  }
  return q;
}

double playout(const Game& game, const GameState& state, const PolicySpec* policy,
               const FeatureSet& features, int cap, Rng& rng) {
  std::optional<FeatureEvaluator> evaluator;
  std::vector<double> weights;
  if (policy) {
    evaluator.emplace(game, features);
    weights = policy->effective_weights();
    weights.resize(std::max<std::size_t>(weights.size(), static_cast<std::size_t>(features.size())),
                   0.0);
  }
  const double u1 =
      playout_p1(game, state, weights, evaluator ? &*evaluator : nullptr, cap, rng);
  return u1 * mover_sign(state.mover());
}

class Searcher {
 public:
  Searcher(const Game& game, const FeatureSet& features, const PolicySpec* prior,
           const SearchConfig& cfg, Rng& rng, FeatureEvaluator* evaluator)
      : game_(game), cfg_(cfg), rng_(rng), prior_(prior != nullptr) {
    const bool needs_features = prior || cfg.playout_policy;
    if (needs_features) {
      if (evaluator) {
        evaluator_ = evaluator;
      } else {
        owned_.emplace(game, features);
        evaluator_ = &*owned_;
      }
    }
    const auto fit = [&](std::vector<double> w) {
      if (w.size() < static_cast<std::size_t>(features.size())) {
        throw std::invalid_argument("policy has fewer weights than the feature set");
      }
      return w;
    };
    if (prior) prior_weights_ = fit(prior->effective_weights());
    if (cfg.playout_policy) playout_weights_ = fit(cfg.playout_policy->effective_weights());
  }

  void run(SearchTree& tree) {
    generation_ = ++tree.generation;
    std::vector<std::pair<SearchNode*, std::size_t>> path;
    for (int it = 0; it < cfg_.iterations; ++it) {
      path.clear();
      SearchNode* node = tree.root.get();
      double u1 = 0.0;
      while (true) {
        if (node->state_.is_terminal()) {
          u1 = node->state_.outcome()->utility_p1;
          ++node->visits_;
          break;
        }
        const std::size_t idx = select(*node);
        path.emplace_back(node, idx);
        Edge& edge = node->edges_[idx];
        if (!edge.child) {
          edge.child = std::make_unique<SearchNode>(
              game_, game_.apply_unchecked(node->state_, edge.action));
          const GameState& s = edge.child->state_;
          u1 = s.is_terminal() ? s.outcome()->utility_p1
                               : playout_p1(game_, s, playout_weights_,
                                            cfg_.playout_policy ? evaluator_ : nullptr,
                                            cfg_.playout_cap, rng_);
          break;
        }
        node = edge.child.get();
      }
      for (auto& [n, idx] : path) {
        ++n->visits_;
        EdgeStats& s = n->edges_[idx].stats;
        ++s.visits;
        s.value_sum += u1 * mover_sign(n->state_.mover());
      }
    }
  }

 private:
  std::size_t select(SearchNode& node) {
    Rng* tie_rng = cfg_.random_tie_break ? &rng_ : nullptr;
    std::vector<EdgeStats>& stats = scratch_stats_;
    if (cfg_.selection == SelectionRule::kPuct && node.prior_generation_ != generation_) {
      assign_priors(node);
    }
    stats.clear();
    for (const auto& e : node.edges_) stats.push_back(e.stats);
    if (cfg_.selection == SelectionRule::kUcb1) {
      return ucb1_select_impl(stats, cfg_.exploration, tie_rng);
    }
    return puct_select_impl(stats, node.value_estimate(), cfg_.exploration, tie_rng);
  }

  void assign_priors(SearchNode& node) {
    node.prior_generation_ = generation_;
    const std::size_t n = node.edges_.size();
    if (!prior_) {
      for (auto& e : node.edges_) e.stats.prior = 1.0 / static_cast<double>(n);
      return;
    }
    logits_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      logits_[i] = logit(prior_weights_, evaluator_->active(node.state_, node.edges_[i].action));
    }
    const ActionDistribution p = softmax(logits_);
    for (std::size_t i = 0; i < n; ++i) node.edges_[i].stats.prior = p[i];
  }

  const Game& game_;
  const SearchConfig& cfg_;
  Rng& rng_;
  bool prior_;
  std::optional<FeatureEvaluator> owned_;
  FeatureEvaluator* evaluator_ = nullptr;
  std::vector<double> prior_weights_;
  std::vector<double> playout_weights_;
  std::vector<double> logits_;
  std::vector<EdgeStats> scratch_stats_;
  std::uint64_t generation_ = 0;
};

SearchResult run_search(const Game& game, const GameState& root_state, const FeatureSet& features,
                        const PolicySpec* prior, const SearchConfig& cfg, SearchTree reused,
                        Rng& rng, FeatureEvaluator* evaluator) {
  if (root_state.is_terminal()) throw ContractViolation("search from a terminal state");
  if (cfg.iterations < 1) throw std::invalid_argument("search needs at least one iteration");

  SearchTree tree;
  if (cfg.tree_reuse && !reused.empty()) {
    if (!(reused.root->state() == root_state)) {
      throw ContractViolation("reused tree does not start at the search root");
    }
    tree = std::move(reused);
  } else {
    tree.root = std::make_unique<SearchNode>(game, root_state);
  }

  Searcher searcher(game, features, prior, cfg, rng, evaluator);
  searcher.run(tree);

  SearchResult result;
  const SearchNode& root = *tree.root;
  for (const auto& e : root.edges()) {
    result.actions.push_back(e.action);
    result.visit_counts.push_back(e.stats.visits);
  }
  result.visit_distribution = visit_distribution(root);
  result.q_estimates = q_estimates(root);
  result.root_value = root.value_estimate();
  result.iterations = cfg.iterations;
  result.tree = std::move(tree);
  return result;
}

SearchTree child_subtree(SearchTree tree, Action action) {
  SearchTree out;
  out.generation = tree.generation;
  if (tree.empty()) return out;
  const auto idx = tree.root->edge_index(action);
  if (!idx) return out;
  out.root = std::move(tree.root->edges()[*idx].child);
  return out;
}

SearchTree rebase_tree(SearchTree tree, Action own_action, Action opponent_action) {
  return child_subtree(child_subtree(std::move(tree), own_action), opponent_action);
}

std::string search_log_line(int move_number, const SearchResult& result) {
  std::vector<int> top = result.visit_counts;
  std::sort(top.begin(), top.end(), std::greater<>());
  top.resize(3, 0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%d,%d,%d", move_number, result.iterations,
                result.root_value, top[0], top[1], top[2]);
  return buf;
}

}  // namespace tspg
