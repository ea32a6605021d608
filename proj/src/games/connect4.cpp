#include "games.hpp"

namespace tspg::games {
namespace {

BoardGeometry connect4_board() {
  std::vector<Coord> coords;
  for (int y = 0; y < Connect4::kHeight; ++y)
    for (int x = 0; x < Connect4::kWidth; ++x) coords.push_back({x, y});
  return BoardGeometry(Lattice::kSquare, std::move(coords));
}

int cell_of(int x, int y) { return y * Connect4::kWidth + x; }

bool on_board(int x, int y) {
  return x >= 0 && x < Connect4::kWidth && y >= 0 && y < Connect4::kHeight;
}

bool four_through(const GameState& s, int x, int y) {
  const std::int8_t stone = s.at(cell_of(x, y));
  constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (const auto& d : kDirs) {
    int run = 1;
    for (int sign : {1, -1}) {
      int cx = x + sign * d[0], cy = y + sign * d[1];
      while (on_board(cx, cy) && s.at(cell_of(cx, cy)) == stone) {
        ++run;
        cx += sign * d[0];
        cy += sign * d[1];
      }
    }
    if (run >= 4) return true;
  }
  return false;
}

}  // namespace

Connect4::Connect4() : Game(connect4_board(), mirror_x_group()) {}

void Connect4::generate_actions(const GameState& state, std::vector<Action>& out) const {
  for (int x = 0; x < kWidth; ++x) {
    for (int y = 0; y < kHeight; ++y) {
      if (state.is_empty(cell_of(x, y))) {
        out.push_back(Action::place(cell_of(x, y)));
        break;
      }
    }
  }
}

bool Connect4::is_legal(const GameState& state, Action action) const {
  if (!action.is_placement() || action.to < 0 || action.to >= kWidth * kHeight) return false;
  const int x = action.to % kWidth, y = action.to / kWidth;
  return state.is_empty(action.to) && (y == 0 || !state.is_empty(cell_of(x, y - 1)));
}

std::optional<Outcome> Connect4::play(GameState& state, Action action) const {
  set_cell(state, action.to, stone_of(state.mover()));
  if (four_through(state, action.to % kWidth, action.to / kWidth)) {
    return Outcome::win_for(state.mover());
  }
  return std::nullopt;
}

bool Connect4::has_moves(const GameState& state) const {
  for (int x = 0; x < kWidth; ++x)
    if (state.is_empty(cell_of(x, kHeight - 1))) return true;
  return false;
}

std::optional<Outcome> Connect4::scan_outcome(const GameState& state, Player last_mover) const {
  bool won[2] = {false, false};
  for (int y = 0; y < kHeight; ++y) {
    for (int x = 0; x < kWidth; ++x) {
      const std::int8_t v = state.at(cell_of(x, y));
      if (v != kEmptyCell && four_through(state, x, y)) won[v - 1] = true;
    }
  }
  if (won[index_of(last_mover)]) return Outcome::win_for(last_mover);
  if (won[index_of(opponent(last_mover))]) return Outcome::win_for(opponent(last_mover));
  return std::nullopt;
}

}  // namespace tspg::games
