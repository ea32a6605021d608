#pragma once

// Two-player, deterministic, perfect-information board games.
//
// Every game in this library strictly alternates movers and keeps its board in
// a flat array of cells. A BoardGeometry maps cells to lattice coordinates
// (square or axial-hexagonal) so that pattern features can be matched
// generically across games.

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tspg {

// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Player : std::uint8_t { kP1 = 0, kP2 = 1 };

constexpr Player opponent(Player p) {
  return p == Player::kP1 ? Player::kP2 : Player::kP1;
}
constexpr int index_of(Player p) { return static_cast<int>(p); }
std::string_view player_name(Player p);

struct Outcome {
  int utility_p1 = 0;
  int utility_p2 = 0;

  static Outcome win_for(Player p);
  static Outcome draw() { return {}; }

  int utility(Player p) const { return p == Player::kP1 ? utility_p1 : utility_p2; }
  bool operator==(const Outcome&) const = default;
};

struct Action {
  std::int16_t from = -1;  // source cell for movement games, -1 for placements
  std::int16_t to = -1;

  static Action place(int cell) { return {-1, static_cast<std::int16_t>(cell)}; }
  static Action move(int from, int to) {
    return {static_cast<std::int16_t>(from), static_cast<std::int16_t>(to)};
  }
  bool is_placement() const { return from < 0; }
  auto operator<=>(const Action&) const = default;
};

inline constexpr int kMaxCells = 128;

// Cell contents: 0 empty, 1 owned by P1, 2 owned by P2.
inline constexpr std::int8_t kEmptyCell = 0;
constexpr std::int8_t stone_of(Player p) { return static_cast<std::int8_t>(index_of(p) + 1); }

class GameState {
 public:
  std::int8_t at(int cell) const { return cells_[static_cast<std::size_t>(cell)]; }
  bool is_empty(int cell) const { return at(cell) == kEmptyCell; }
  Player mover() const { return mover_; }
  int move_count() const { return move_count_; }
  bool is_terminal() const { return outcome_.has_value(); }
  const std::optional<Outcome>& outcome() const { return outcome_; }

  bool operator==(const GameState&) const = default;

 private:
  friend class Game;

  std::array<std::int8_t, kMaxCells> cells_{};
  Player mover_ = Player::kP1;
  std::int32_t move_count_ = 0;
  std::optional<Outcome> outcome_;
};

struct Coord {
  int x = 0;
  int y = 0;
  auto operator<=>(const Coord&) const = default;
};

enum class Lattice : std::uint8_t { kSquare, kHex };

// Linear map on lattice offsets: (x, y) -> (a*x + b*y, c*x + d*y).
struct Transform {
  int a = 1, b = 0, c = 0, d = 1;

  Coord apply(Coord p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
  Transform then(const Transform& next) const;
  auto operator<=>(const Transform&) const = default;
};

// Closure of the given generators under composition (identity included).
std::vector<Transform> generate_group(std::span<const Transform> generators);
std::vector<Transform> square_dihedral_group();
std::vector<Transform> hex_dihedral_group();
std::vector<Transform> mirror_x_group();

class BoardGeometry {
 public:
  BoardGeometry(Lattice lattice, std::vector<Coord> coords);

  Lattice lattice() const { return lattice_; }
  int num_cells() const { return static_cast<int>(coords_.size()); }
  Coord coord(int cell) const { return coords_[static_cast<std::size_t>(cell)]; }
  // Cell index at lattice coordinate, or -1 when off the board.
  int cell_at(int x, int y) const {
    if (x < min_x_ || x > max_x_ || y < min_y_ || y > max_y_) return -1;
    return lookup_[static_cast<std::size_t>((y - min_y_) * width_ + (x - min_x_))];
  }
  int min_x() const { return min_x_; }
  int max_x() const { return max_x_; }
  int min_y() const { return min_y_; }
  int max_y() const { return max_y_; }

 private:
  Lattice lattice_;
  std::vector<Coord> coords_;
  int min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0, width_ = 0;
  std::vector<int> lookup_;
};

struct GameOptions {
  int hex_size = 7;
};

class Game {
 public:
  virtual ~Game() = default;

  virtual std::string_view id() const = 0;
  const BoardGeometry& geometry() const { return geometry_; }
  // Symmetries under which local patterns are considered equivalent.
  std::span<const Transform> symmetries() const { return symmetries_; }
  // True when pattern offsets are expressed in the mover's forward frame
  // (P2 sees the board flipped vertically).
  virtual bool player_oriented() const { return false; }
  // True when every action places a stone on an empty target cell.
  virtual bool placement_only() const { return true; }
  GameOptions options() const { return options_; }

  virtual GameState initial_state() const;

  // Canonical board-scan order. Throws ContractViolation on terminal states.
  std::vector<Action> legal_actions(const GameState& state) const;
  // Throws ContractViolation on terminal states or illegal actions.
  GameState apply(const GameState& state, Action action) const;
  // Applies a move previously returned by legal_actions without revalidating it.
  GameState apply_unchecked(const GameState& state, Action action) const;
  std::optional<Outcome> outcome(const GameState& state) const { return state.outcome(); }

  // ASCII diagram preceded by a header line "<id> mover=P1 moves=N".
  std::string to_text(const GameState& state) const;
  GameState from_text(std::string_view text) const;
  std::string action_to_string(Action action) const;

  // Builds a state from explicit board contents. Terminal status is derived by
  // scanning the whole board from the perspective of the player who moved last.
  GameState make_state(std::span<const std::int8_t> cells, Player mover, int move_count) const;

 protected:
  Game(BoardGeometry geometry, std::vector<Transform> symmetries, GameOptions options = {});

  virtual void generate_actions(const GameState& state, std::vector<Action>& out) const = 0;
  virtual bool is_legal(const GameState& state, Action action) const = 0;
  // Updates the board for the mover and returns the outcome if the move ends
  // the game by rule. Mover switching and counting happen in the base class.
  virtual std::optional<Outcome> play(GameState& state, Action action) const = 0;
  // Outcome when the player to move has no legal action.
  virtual Outcome no_moves_outcome(const GameState& state) const;
  virtual bool has_moves(const GameState& state) const;
  // Whole-board terminal check for states not produced by apply.
  virtual std::optional<Outcome> scan_outcome(const GameState& state, Player last_mover) const = 0;

  static void set_cell(GameState& s, int cell, std::int8_t value) {
    s.cells_[static_cast<std::size_t>(cell)] = value;
  }

 private:
  std::vector<int> render_order() const;

  BoardGeometry geometry_;
  std::vector<Transform> symmetries_;
  GameOptions options_;
};

// Known identifiers: "tictactoe", "connect4", "breakthrough", "hex", "yavalath".
std::unique_ptr<Game> make_game(std::string_view id, const GameOptions& options = {});
std::vector<std::string> known_games();

}  // namespace tspg
