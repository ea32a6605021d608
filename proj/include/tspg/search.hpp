#pragma once

// Monte Carlo tree search with PUCT (policy-prior) or UCB1 selection.
//
// Values are utilities in [-1, 1]. Each edge accumulates W(s, a) from the
// perspective of the player to move at s, so Q(s, a) = W / N is always "how
// good is a for the mover". One new node is added per iteration; its value is
// the exact outcome if terminal, else the result of a play-out.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tspg/experience.hpp"
#include "tspg/features.hpp"
#include "tspg/game.hpp"
#include "tspg/policy.hpp"

namespace tspg {

enum class SelectionRule { kPuct, kUcb1 };

struct SearchConfig {
  int iterations = 1600;
  double exploration = 2.5;
  SelectionRule selection = SelectionRule::kPuct;
  // Softmax play-outs when set, uniformly random play-outs otherwise.
  std::optional<PolicySpec> playout_policy;
  int playout_cap = 200;
  bool tree_reuse = true;
  bool random_tie_break = false;
};

struct EdgeStats {
  int visits = 0;
  double value_sum = 0.0;
  double prior = 0.0;
};

class SearchNode;

struct Edge {
  Action action;
  EdgeStats stats;
  std::unique_ptr<SearchNode> child;
};

class SearchNode {
 public:
  SearchNode(const Game& game, GameState state);

  const GameState& state() const { return state_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<Edge> edges() { return edges_; }
  // 1 for the visit that created the node, plus one per later pass.
  int visits() const { return visits_; }
  int edge_visits() const;
  // Sum W / sum N over the edges, or 0 when no edge has been visited.
  double value_estimate() const;
  std::optional<std::size_t> edge_index(Action action) const;

 private:
  friend class Searcher;

  GameState state_;
  std::vector<Edge> edges_;
  int visits_ = 1;
  std::uint64_t prior_generation_ = 0;
};

struct SearchTree {
  std::unique_ptr<SearchNode> root;
  // Incremented by every search; priors computed in an older generation are
  // recomputed from the current prior policy on first use.
  std::uint64_t generation = 0;

  bool empty() const { return root == nullptr; }
};

struct SearchResult {
  std::vector<Action> actions;
  std::vector<int> visit_counts;
  ActionDistribution visit_distribution;
  std::vector<double> q_estimates;
  double root_value = 0.0;
  int iterations = 0;
  SearchTree tree;
};

// Argmax of Q + c * P * sqrt(sum N) / (1 + N). Unvisited edges use
// `parent_value` as Q. When no edge has been visited, sqrt(sum N) is taken as 1
// so that the prior still orders the first expansion. Ties go to the lowest
// index.
std::size_t puct_select(std::span<const EdgeStats> edges, double parent_value, double c);
// Unvisited edges first (lowest index); otherwise argmax Q + c sqrt(ln sum N / N).
std::size_t ucb1_select(std::span<const EdgeStats> edges, double c);

std::size_t puct_select(const SearchNode& node, double c);
std::size_t ucb1_select(const SearchNode& node, double c);

// Throws ContractViolation when no edge has been visited.
ActionDistribution visit_distribution(const SearchNode& node);
// W / N per edge; unvisited edges take the node's value estimate.
std::vector<double> q_estimates(const SearchNode& node);

// Result in {-1, 0, 1} for the player to move in `state`. Reaching `cap` moves
// without a terminal state counts as a tie.
double playout(const Game& game, const GameState& state, const PolicySpec* policy,
               const FeatureSet& features, int cap, Rng& rng);

// Runs cfg.iterations iterations on top of `reused` (when cfg.tree_reuse and
// the tree's root matches `root_state`), or on a fresh tree otherwise.
// `prior` drives PUCT priors (uniform when null). `evaluator`, if given, must
// have been built for `features`.
SearchResult run_search(const Game& game, const GameState& root_state, const FeatureSet& features,
                        const PolicySpec* prior, const SearchConfig& cfg, SearchTree reused,
                        Rng& rng, FeatureEvaluator* evaluator = nullptr);

// Subtree below `action` at the root, or an empty tree.
SearchTree child_subtree(SearchTree tree, Action action);
// Subtree two plies down along (own_action, opponent_action), or an empty tree.
SearchTree rebase_tree(SearchTree tree, Action own_action, Action opponent_action);

// CSV: move,iterations,root_value,top1,top2,top3 (visit counts, descending).
std::string search_log_line(int move_number, const SearchResult& result);

}  // namespace tspg
