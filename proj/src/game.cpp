#include "tspg/game.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "games/games.hpp"

namespace tspg {

std::string_view player_name(Player p) { return p == Player::kP1 ? "P1" : "P2"; }

Outcome Outcome::win_for(Player p) {
  return p == Player::kP1 ? Outcome{1, -1} : Outcome{-1, 1};
}

Transform Transform::then(const Transform& next) const {
  // next * this
  return {next.a * a + next.b * c, next.a * b + next.b * d,
          next.c * a + next.d * c, next.c * b + next.d * d};
}

std::vector<Transform> generate_group(std::span<const Transform> generators) {
  std::set<Transform> group{Transform{}};
  std::vector<Transform> frontier{Transform{}};
  while (!frontier.empty()) {
    std::vector<Transform> next;
    for (const auto& t : frontier) {
      for (const auto& g : generators) {
        Transform composed = t.then(g);
        if (group.insert(composed).second) next.push_back(composed);
      }
    }
    frontier = std::move(next);
  }
  return {group.begin(), group.end()};
}

std::vector<Transform> square_dihedral_group() {
  const Transform gens[] = {{0, -1, 1, 0}, {-1, 0, 0, 1}};
  return generate_group(gens);
}

std::vector<Transform> hex_dihedral_group() {
  // Axial coordinates: 60 degree rotation and the q <-> r reflection.
  const Transform gens[] = {{0, -1, 1, 1}, {0, 1, 1, 0}};
  return generate_group(gens);
}

std::vector<Transform> mirror_x_group() {
  const Transform gens[] = {{-1, 0, 0, 1}};
  return generate_group(gens);
}

BoardGeometry::BoardGeometry(Lattice lattice, std::vector<Coord> coords)
    : lattice_(lattice), coords_(std::move(coords)) {
  if (coords_.empty() || coords_.size() > static_cast<std::size_t>(kMaxCells)) {
    throw std::invalid_argument("board must have between 1 and 128 cells");
  }
  min_x_ = max_x_ = coords_[0].x;
  min_y_ = max_y_ = coords_[0].y;
  for (const auto& c : coords_) {
    min_x_ = std::min(min_x_, c.x);
    max_x_ = std::max(max_x_, c.x);
    min_y_ = std::min(min_y_, c.y);
    max_y_ = std::max(max_y_, c.y);
  }
  width_ = max_x_ - min_x_ + 1;
  lookup_.assign(static_cast<std::size_t>(width_ * (max_y_ - min_y_ + 1)), -1);
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    auto& slot = lookup_[static_cast<std::size_t>((coords_[i].y - min_y_) * width_ +
                                                  (coords_[i].x - min_x_))];
    if (slot != -1) throw std::invalid_argument("duplicate board coordinate");
    slot = static_cast<int>(i);
  }
}

Game::Game(BoardGeometry geometry, std::vector<Transform> symmetries, GameOptions options)
    : geometry_(std::move(geometry)), symmetries_(std::move(symmetries)), options_(options) {}

GameState Game::initial_state() const {
  std::vector<std::int8_t> cells(static_cast<std::size_t>(geometry_.num_cells()), kEmptyCell);
  return make_state(cells, Player::kP1, 0);
}

std::vector<Action> Game::legal_actions(const GameState& state) const {
  if (state.is_terminal()) throw ContractViolation("legal_actions called on a terminal state");
  std::vector<Action> out;
  generate_actions(state, out);
  return out;
}

GameState Game::apply(const GameState& state, Action action) const {
  if (state.is_terminal()) throw ContractViolation("apply called on a terminal state");
  if (!is_legal(state, action)) {
    throw ContractViolation("illegal action " + action_to_string(action));
  }
  return apply_unchecked(state, action);
}

GameState Game::apply_unchecked(const GameState& state, Action action) const {
  GameState next = state;
  std::optional<Outcome> result = play(next, action);
  next.mover_ = opponent(state.mover_);
  next.move_count_ = state.move_count_ + 1;
  if (result) {
    next.outcome_ = result;
  } else if (!has_moves(next)) {
    next.outcome_ = no_moves_outcome(next);
  }
  return next;
}

Outcome Game::no_moves_outcome(const GameState&) const { return Outcome::draw(); }

bool Game::has_moves(const GameState& state) const {
  std::vector<Action> tmp;
  generate_actions(state, tmp);
  return !tmp.empty();
}

GameState Game::make_state(std::span<const std::int8_t> cells, Player mover, int move_count) const {
  if (cells.size() != static_cast<std::size_t>(geometry_.num_cells())) {
    throw std::invalid_argument("cell count does not match the board");
  }
  GameState s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] < 0 || cells[i] > 2) throw std::invalid_argument("bad cell content");
    s.cells_[i] = cells[i];
  }
  s.mover_ = mover;
  s.move_count_ = move_count;
  if (auto o = scan_outcome(s, opponent(mover))) {
    s.outcome_ = o;
  } else if (!has_moves(s)) {
    s.outcome_ = no_moves_outcome(s);
  }
  return s;
}

std::vector<int> Game::render_order() const {
  // Square boards print the highest row first; hex boards print rows in
  // increasing r. Within a row cells go left to right.
  std::map<int, std::vector<int>> rows;
  for (int c = 0; c < geometry_.num_cells(); ++c) rows[geometry_.coord(c).y].push_back(c);
  std::vector<int> order;
  auto emit = [&](std::vector<int>& row) {
    std::sort(row.begin(), row.end(),
              [&](int a, int b) { return geometry_.coord(a).x < geometry_.coord(b).x; });
    order.insert(order.end(), row.begin(), row.end());
  };
  if (geometry_.lattice() == Lattice::kSquare) {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) emit(it->second);
  } else {
    for (auto& [y, row] : rows) emit(row);
  }
  return order;
}

std::string Game::to_text(const GameState& state) const {
  std::ostringstream os;
  os << id() << " mover=" << player_name(state.mover()) << " moves=" << state.move_count() << '\n';
  const auto order = render_order();
  const bool hex = geometry_.lattice() == Lattice::kHex;
  // Hex rows are shifted by half a cell per row: pixel x = 2q + r.
  int min_indent = 0;
  if (hex) {
    min_indent = 1 << 20;
    for (int c : order) {
      Coord p = geometry_.coord(c);
      min_indent = std::min(min_indent, 2 * p.x + p.y);
    }
  }
  std::optional<int> row_y;
  for (int c : order) {
    Coord p = geometry_.coord(c);
    if (!row_y || *row_y != p.y) {
      if (row_y) os << '\n';
      row_y = p.y;
      if (hex) os << std::string(static_cast<std::size_t>(2 * p.x + p.y - min_indent), ' ');
    } else {
      os << ' ';
    }
    const std::int8_t v = state.at(c);
    os << (v == 0 ? '.' : v == 1 ? 'X' : 'O');
  }
  os << '\n';
  return os.str();
}

GameState Game::from_text(std::string_view text) const {
  std::istringstream is{std::string(text)};
  std::string header_id, mover_field, moves_field;
  is >> header_id >> mover_field >> moves_field;
  if (header_id != id()) throw std::invalid_argument("state text is for game '" + header_id + "'");
  Player mover;
  if (mover_field == "mover=P1") {
    mover = Player::kP1;
  } else if (mover_field == "mover=P2") {
    mover = Player::kP2;
  } else {
    throw std::invalid_argument("bad mover field: " + mover_field);
  }
  if (moves_field.rfind("moves=", 0) != 0) throw std::invalid_argument("bad moves field");
  const int moves = std::stoi(moves_field.substr(6));
  const auto order = render_order();
  std::vector<std::int8_t> cells(order.size(), kEmptyCell);
  std::size_t next = 0;
  char ch;
  while (is.get(ch)) {
    if (ch != '.' && ch != 'X' && ch != 'O') continue;
    if (next >= order.size()) throw std::invalid_argument("too many cells in state text");
    cells[static_cast<std::size_t>(order[next++])] =
        static_cast<std::int8_t>(ch == '.' ? 0 : ch == 'X' ? 1 : 2);
  }
  if (next != order.size()) throw std::invalid_argument("too few cells in state text");
  return make_state(cells, mover, moves);
}

std::string Game::action_to_string(Action action) const {
  auto cell_name = [&](int cell) {
    if (cell < 0 || cell >= geometry_.num_cells()) return std::string("?");
    Coord p = geometry_.coord(cell);
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
  };
  if (action.is_placement()) return cell_name(action.to);
  return cell_name(action.from) + "->" + cell_name(action.to);
}

std::unique_ptr<Game> make_game(std::string_view id, const GameOptions& options) {
  if (id == "tictactoe") return std::make_unique<games::TicTacToe>();
  if (id == "connect4") return std::make_unique<games::Connect4>();
  if (id == "breakthrough") return std::make_unique<games::Breakthrough>();
  if (id == "hex") return std::make_unique<games::Hex>(options.hex_size);
  if (id == "yavalath") return std::make_unique<games::Yavalath>();
  throw std::invalid_argument("unknown game '" + std::string(id) + "'");
}

std::vector<std::string> known_games() {
  return {"tictactoe", "connect4", "breakthrough", "hex", "yavalath"};
}

}  // namespace tspg
