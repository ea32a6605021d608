#include "tspg/minimax.hpp"

#include <algorithm>

namespace tspg {

std::string MinimaxSolver::key(const GameState& state) const {
  std::string k(static_cast<std::size_t>(game_->geometry().num_cells()) + 1, '\0');
  for (int c = 0; c < game_->geometry().num_cells(); ++c) {
    k[static_cast<std::size_t>(c)] = static_cast<char>('0' + state.at(c));
  }
  k.back() = state.mover() == Player::kP1 ? 'a' : 'b';
  return k;
}

int MinimaxSolver::value(const GameState& state) {
  if (state.is_terminal()) return state.outcome()->utility(state.mover());
  const std::string k = key(state);
  if (auto it = table_.find(k); it != table_.end()) return it->second;
  int best = -1;
  for (Action a : game_->legal_actions(state)) {
    best = std::max(best, -value(game_->apply(state, a)));
    if (best == 1) break;
  }
  table_.emplace(k, best);
  return best;
}

std::vector<std::size_t> MinimaxSolver::optimal_actions(const GameState& state) {
  const int target = value(state);
  const auto actions = game_->legal_actions(state);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (-value(game_->apply(state, actions[i])) == target) out.push_back(i);
  }
  return out;
}

}  // namespace tspg
