#include <array>

#include "games.hpp"

namespace tspg::games {
namespace {

BoardGeometry square_board(int width, int height) {
  std::vector<Coord> coords;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) coords.push_back({x, y});
  return BoardGeometry(Lattice::kSquare, std::move(coords));
}

constexpr std::array<std::array<int, 3>, 8> kLines = {{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},  // rows
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},  // columns
    {0, 4, 8}, {2, 4, 6},             // diagonals
}};

bool has_line(const GameState& s, std::int8_t stone) {
  for (const auto& line : kLines) {
    if (s.at(line[0]) == stone && s.at(line[1]) == stone && s.at(line[2]) == stone) return true;
  }
  return false;
}

}  // namespace

TicTacToe::TicTacToe() : Game(square_board(3, 3), square_dihedral_group()) {}

void TicTacToe::generate_actions(const GameState& state, std::vector<Action>& out) const {
  for (int c = 0; c < 9; ++c)
    if (state.is_empty(c)) out.push_back(Action::place(c));
}

bool TicTacToe::is_legal(const GameState& state, Action action) const {
  return action.is_placement() && action.to >= 0 && action.to < 9 && state.is_empty(action.to);
}

std::optional<Outcome> TicTacToe::play(GameState& state, Action action) const {
  const std::int8_t stone = stone_of(state.mover());
  set_cell(state, action.to, stone);
  if (has_line(state, stone)) return Outcome::win_for(state.mover());
  return std::nullopt;
}

bool TicTacToe::has_moves(const GameState& state) const {
  for (int c = 0; c < 9; ++c)
    if (state.is_empty(c)) return true;
  return false;
}

std::optional<Outcome> TicTacToe::scan_outcome(const GameState& state, Player last_mover) const {
  if (has_line(state, stone_of(last_mover))) return Outcome::win_for(last_mover);
  if (has_line(state, stone_of(opponent(last_mover)))) return Outcome::win_for(opponent(last_mover));
  return std::nullopt;
}

}  // namespace tspg::games
