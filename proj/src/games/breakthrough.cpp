#include "games.hpp"

namespace tspg::games {
namespace {

constexpr int kN = Breakthrough::kSize;

BoardGeometry breakthrough_board() {
  std::vector<Coord> coords;
  for (int y = 0; y < kN; ++y)
    for (int x = 0; x < kN; ++x) coords.push_back({x, y});
  return BoardGeometry(Lattice::kSquare, std::move(coords));
}

int forward(Player p) { return p == Player::kP1 ? 1 : -1; }
int goal_row(Player p) { return p == Player::kP1 ? kN - 1 : 0; }

}  // namespace

Breakthrough::Breakthrough() : Game(breakthrough_board(), mirror_x_group()) {}

GameState Breakthrough::initial_state() const {
  std::vector<std::int8_t> cells(kN * kN, kEmptyCell);
  for (int x = 0; x < kN; ++x) {
    cells[static_cast<std::size_t>(x)] = cells[static_cast<std::size_t>(kN + x)] = 1;
    cells[static_cast<std::size_t>((kN - 2) * kN + x)] = 2;
    cells[static_cast<std::size_t>((kN - 1) * kN + x)] = 2;
  }
  return make_state(cells, Player::kP1, 0);
}

void Breakthrough::generate_actions(const GameState& state, std::vector<Action>& out) const {
  const Player p = state.mover();
  const std::int8_t own = stone_of(p);
  const int dy = forward(p);
  for (int from = 0; from < kN * kN; ++from) {
    if (state.at(from) != own) continue;
    const int x = from % kN, y = from / kN + dy;
    if (y < 0 || y >= kN) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      const int tx = x + dx;
      if (tx < 0 || tx >= kN) continue;
      const int to = y * kN + tx;
      const std::int8_t target = state.at(to);
      if (dx == 0 ? target == kEmptyCell : target != own) out.push_back(Action::move(from, to));
    }
  }
}

bool Breakthrough::is_legal(const GameState& state, Action action) const {
  if (action.is_placement() || action.from >= kN * kN || action.to < 0 || action.to >= kN * kN) {
    return false;
  }
  const Player p = state.mover();
  const std::int8_t own = stone_of(p);
  if (state.at(action.from) != own) return false;
  const int fx = action.from % kN, fy = action.from / kN;
  const int tx = action.to % kN, ty = action.to / kN;
  const int dx = tx - fx;
  if (ty - fy != forward(p) || dx < -1 || dx > 1) return false;
  const std::int8_t target = state.at(action.to);
  return dx == 0 ? target == kEmptyCell : target != own;
}

std::optional<Outcome> Breakthrough::play(GameState& state, Action action) const {
  const Player p = state.mover();
  const bool capture = state.at(action.to) != kEmptyCell;
  set_cell(state, action.from, kEmptyCell);
  set_cell(state, action.to, stone_of(p));
  if (action.to / kN == goal_row(p)) return Outcome::win_for(p);
  if (capture) {
    const std::int8_t enemy = stone_of(opponent(p));
    for (int c = 0; c < kN * kN; ++c)
      if (state.at(c) == enemy) return std::nullopt;
    return Outcome::win_for(p);
  }
  return std::nullopt;
}

Outcome Breakthrough::no_moves_outcome(const GameState& state) const {
  return Outcome::win_for(opponent(state.mover()));
}

std::optional<Outcome> Breakthrough::scan_outcome(const GameState& state, Player last_mover) const {
  for (Player p : {last_mover, opponent(last_mover)}) {
    bool enemy_left = false;
    for (int c = 0; c < kN * kN; ++c) {
      if (state.at(c) == stone_of(p) && c / kN == goal_row(p)) return Outcome::win_for(p);
      if (state.at(c) == stone_of(opponent(p))) enemy_left = true;
    }
    if (!enemy_left) return Outcome::win_for(p);
  }
  return std::nullopt;
}

}  // namespace tspg::games
