#pragma once

#include "tspg/game.hpp"

namespace tspg::games {

class TicTacToe final : public Game {
 public:
  TicTacToe();
  std::string_view id() const override { return "tictactoe"; }

 protected:
  void generate_actions(const GameState& state, std::vector<Action>& out) const override;
  bool is_legal(const GameState& state, Action action) const override;
  std::optional<Outcome> play(GameState& state, Action action) const override;
  bool has_moves(const GameState& state) const override;
  std::optional<Outcome> scan_outcome(const GameState& state, Player last_mover) const override;
};

// 7 columns by 6 rows; cell = row * 7 + column with row 0 at the bottom.
class Connect4 final : public Game {
 public:
  static constexpr int kWidth = 7;
  static constexpr int kHeight = 6;

  Connect4();
  std::string_view id() const override { return "connect4"; }

 protected:
  void generate_actions(const GameState& state, std::vector<Action>& out) const override;
  bool is_legal(const GameState& state, Action action) const override;
  std::optional<Outcome> play(GameState& state, Action action) const override;
  bool has_moves(const GameState& state) const override;
  std::optional<Outcome> scan_outcome(const GameState& state, Player last_mover) const override;
};

// 8x8. P1 starts on rows 0-1 and moves towards row 7; P2 the reverse.
// A player wins by reaching the far row or capturing every enemy piece.
class Breakthrough final : public Game {
 public:
  static constexpr int kSize = 8;

  Breakthrough();
  std::string_view id() const override { return "breakthrough"; }
  bool player_oriented() const override { return true; }
  bool placement_only() const override { return false; }
  GameState initial_state() const override;

 protected:
  void generate_actions(const GameState& state, std::vector<Action>& out) const override;
  bool is_legal(const GameState& state, Action action) const override;
  std::optional<Outcome> play(GameState& state, Action action) const override;
  Outcome no_moves_outcome(const GameState& state) const override;
  std::optional<Outcome> scan_outcome(const GameState& state, Player last_mover) const override;
};

// Rhombus board in axial coordinates (q = x, r = y). P1 joins rows r = 0 and
// r = n - 1, P2 joins columns q = 0 and q = n - 1. No swap rule.
class Hex final : public Game {
 public:
  explicit Hex(int size);
  std::string_view id() const override { return "hex"; }
  int size() const { return size_; }

 protected:
  void generate_actions(const GameState& state, std::vector<Action>& out) const override;
  bool is_legal(const GameState& state, Action action) const override;
  std::optional<Outcome> play(GameState& state, Action action) const override;
  bool has_moves(const GameState& state) const override;
  std::optional<Outcome> scan_outcome(const GameState& state, Player last_mover) const override;

 private:
  bool connects(const GameState& state, int start, Player p) const;
  int size_;
};

// Hexagonal board of side 5 (61 cells), axial coordinates with
// |q|, |r|, |q + r| <= 4. Four in a row wins; three in a row (without four)
// loses. A full board is a draw.
class Yavalath final : public Game {
 public:
  static constexpr int kRadius = 4;

  Yavalath();
  std::string_view id() const override { return "yavalath"; }

 protected:
  void generate_actions(const GameState& state, std::vector<Action>& out) const override;
  bool is_legal(const GameState& state, Action action) const override;
  std::optional<Outcome> play(GameState& state, Action action) const override;
  bool has_moves(const GameState& state) const override;
  std::optional<Outcome> scan_outcome(const GameState& state, Player last_mover) const override;

 private:
  // Longest run of `stone` through `cell` along each of the three axes.
  int longest_run(const GameState& state, int cell, std::int8_t stone, bool& has_three) const;
};

}  // namespace tspg::games
