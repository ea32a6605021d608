#include <array>
#include <stdexcept>

#include "games.hpp"

namespace tspg::games {
namespace {

constexpr int kNeighbours[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};

BoardGeometry rhombus(int n) {
  if (n < 2 || n * n > kMaxCells) throw std::invalid_argument("hex size must be in [2, 11]");
  std::vector<Coord> coords;
  for (int r = 0; r < n; ++r)
    for (int q = 0; q < n; ++q) coords.push_back({q, r});
  return BoardGeometry(Lattice::kHex, std::move(coords));
}

}  // namespace

Hex::Hex(int size) : Game(rhombus(size), hex_dihedral_group(), GameOptions{size}), size_(size) {}

void Hex::generate_actions(const GameState& state, std::vector<Action>& out) const {
  for (int c = 0; c < size_ * size_; ++c)
    if (state.is_empty(c)) out.push_back(Action::place(c));
}

bool Hex::is_legal(const GameState& state, Action action) const {
  return action.is_placement() && action.to >= 0 && action.to < size_ * size_ &&
         state.is_empty(action.to);
}

bool Hex::connects(const GameState& state, int start, Player p) const {
  const std::int8_t stone = stone_of(p);
  std::array<bool, kMaxCells> seen{};
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  bool low = false, high = false;
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    const int q = c % size_, r = c / size_;
    const int along = p == Player::kP1 ? r : q;
    low |= along == 0;
    high |= along == size_ - 1;
    if (low && high) return true;
    for (const auto& d : kNeighbours) {
      const int nq = q + d[0], nr = r + d[1];
      if (nq < 0 || nq >= size_ || nr < 0 || nr >= size_) continue;
      const int n = nr * size_ + nq;
      if (!seen[static_cast<std::size_t>(n)] && state.at(n) == stone) {
        seen[static_cast<std::size_t>(n)] = true;
        stack.push_back(n);
      }
    }
  }
  return false;
}

std::optional<Outcome> Hex::play(GameState& state, Action action) const {
  set_cell(state, action.to, stone_of(state.mover()));
  if (connects(state, action.to, state.mover())) return Outcome::win_for(state.mover());
  return std::nullopt;
}

bool Hex::has_moves(const GameState& state) const {
  for (int c = 0; c < size_ * size_; ++c)
    if (state.is_empty(c)) return true;
  return false;
}

std::optional<Outcome> Hex::scan_outcome(const GameState& state, Player last_mover) const {
  for (Player p : {last_mover, opponent(last_mover)}) {
    for (int i = 0; i < size_; ++i) {
      const int c = p == Player::kP1 ? i : i * size_;
      if (state.at(c) == stone_of(p) && connects(state, c, p)) return Outcome::win_for(p);
    }
  }
  return std::nullopt;
}

}  // namespace tspg::games
