#include <algorithm>
#include <cstdlib>

#include "games.hpp"

namespace tspg::games {
namespace {

constexpr int kR = Yavalath::kRadius;
constexpr int kAxes[3][2] = {{1, 0}, {0, 1}, {1, -1}};

BoardGeometry hexagon() {
  std::vector<Coord> coords;
  for (int r = -kR; r <= kR; ++r)
    for (int q = -kR; q <= kR; ++q)
      if (std::abs(q + r) <= kR) coords.push_back({q, r});
  return BoardGeometry(Lattice::kHex, std::move(coords));
}

}  // namespace

Yavalath::Yavalath() : Game(hexagon(), hex_dihedral_group()) {}

void Yavalath::generate_actions(const GameState& state, std::vector<Action>& out) const {
  for (int c = 0; c < geometry().num_cells(); ++c)
    if (state.is_empty(c)) out.push_back(Action::place(c));
}

bool Yavalath::is_legal(const GameState& state, Action action) const {
  return action.is_placement() && action.to >= 0 && action.to < geometry().num_cells() &&
         state.is_empty(action.to);
}

int Yavalath::longest_run(const GameState& state, int cell, std::int8_t stone,
                          bool& has_three) const {
  const Coord p = geometry().coord(cell);
  int longest = 0;
  has_three = false;
  for (const auto& d : kAxes) {
    int run = 1;
    for (int sign : {1, -1}) {
      int x = p.x + sign * d[0], y = p.y + sign * d[1];
      for (int n = geometry().cell_at(x, y); n >= 0 && state.at(n) == stone;
           n = geometry().cell_at(x, y)) {
        ++run;
        x += sign * d[0];
        y += sign * d[1];
      }
    }
    longest = std::max(longest, run);
    has_three |= run == 3;
  }
  return longest;
}

std::optional<Outcome> Yavalath::play(GameState& state, Action action) const {
  const Player p = state.mover();
  set_cell(state, action.to, stone_of(p));
  bool three = false;
  // A four (or longer) takes precedence over a simultaneous three.
  if (longest_run(state, action.to, stone_of(p), three) >= 4) return Outcome::win_for(p);
  if (three) return Outcome::win_for(opponent(p));
  return std::nullopt;
}

bool Yavalath::has_moves(const GameState& state) const {
  for (int c = 0; c < geometry().num_cells(); ++c)
    if (state.is_empty(c)) return true;
  return false;
}

std::optional<Outcome> Yavalath::scan_outcome(const GameState& state, Player last_mover) const {
  // Without move history, the last mover's lines decide: a four wins for
  // them, otherwise a three loses for them.
  bool four = false, three = false;
  const std::int8_t stone = stone_of(last_mover);
  for (int c = 0; c < geometry().num_cells(); ++c) {
    if (state.at(c) != stone) continue;
    bool t = false;
    four |= longest_run(state, c, stone, t) >= 4;
    three |= t;
  }
  if (four) return Outcome::win_for(last_mover);
  if (three) return Outcome::win_for(opponent(last_mover));
  return std::nullopt;
}

}  // namespace tspg::games
