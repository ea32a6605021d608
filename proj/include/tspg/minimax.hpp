#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "tspg/game.hpp"

namespace tspg {

// Exact negamax solver with a transposition table. Only practical for tiny
// games such as Tic-Tac-Toe; serves as the ground-truth oracle for search.
class MinimaxSolver {
 public:
  explicit MinimaxSolver(const Game& game) : game_(&game) {}

  // Game-theoretic value in {-1, 0, 1} for the player to move.
  int value(const GameState& state);
  // Indices into legal_actions(state) whose successors achieve value(state).
  std::vector<std::size_t> optimal_actions(const GameState& state);
  std::size_t table_size() const { return table_.size(); }

 private:
  std::string key(const GameState& state) const;

  const Game* game_;
  std::unordered_map<std::string, int> table_;
};

}  // namespace tspg
