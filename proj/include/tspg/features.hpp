#pragma once

// Binary state-action features built from local board patterns.
//
// A FeatureSpec is a set of (offset, content) elements anchored at the
// action's target cell (or, for movement games, optionally its source cell).
// Offsets are lattice offsets in the mover's frame; a spec is active when any
// of its symmetry images matches the board around the anchor.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tspg/game.hpp"

namespace tspg {

enum class CellContent : std::uint8_t { kEmpty = 0, kFriend = 1, kEnemy = 2, kOffBoard = 3 };
std::string_view content_name(CellContent c);

enum class Anchor : std::uint8_t { kTo = 0, kFrom = 1 };

struct PatternElement {
  int dx = 0;
  int dy = 0;
  CellContent content = CellContent::kEmpty;
  auto operator<=>(const PatternElement&) const = default;
};

struct FeatureSpec {
  Anchor anchor = Anchor::kTo;
  std::vector<PatternElement> elements;  // sorted, offsets unique

  // Sorts elements and validates: non-empty, no repeated offset.
  static FeatureSpec make(Anchor anchor, std::vector<PatternElement> elements);
  auto operator<=>(const FeatureSpec&) const = default;
};

// Line form: "(dx,dy:content) (dx,dy:content) ..." with an optional leading
// "from" marker for source-anchored specs.
std::string to_string(const FeatureSpec& spec);
FeatureSpec parse_feature_spec(std::string_view line);

struct SparseFeatureVector {
  std::vector<int> active;  // strictly increasing
  int dimension = 0;

  bool is_active(int index) const;
  bool operator==(const SparseFeatureVector&) const = default;
};

// One matched symmetry image of feature `feature`, expressed in the mover frame.
struct FeatureInstance {
  int feature = 0;
  FeatureSpec image;
};

class FeatureSet {
 public:
  FeatureSet() = default;
  // Empty set carrying the pattern symmetries and frame conventions of `game`.
  static FeatureSet empty_for(const Game& game);

  int size() const { return static_cast<int>(features_.size()); }
  int version() const { return version_; }
  const FeatureSpec& spec(int index) const { return features_.at(static_cast<std::size_t>(index)).spec; }

  // Lexicographically smallest symmetry image, with elements implied by the
  // game's rules removed (a placement target is always empty).
  FeatureSpec canonical(const FeatureSpec& spec) const;
  bool contains(const FeatureSpec& spec) const;
  // Appends `spec` and bumps the version. Throws std::invalid_argument when an
  // equivalent spec is already present.
  FeatureSet with_feature(FeatureSpec spec) const;

  SparseFeatureVector extract(const Game& game, const GameState& state, Action action) const;
  void extract_into(const Game& game, const GameState& state, Action action,
                    std::vector<int>& active) const;
  std::vector<FeatureInstance> instances(const Game& game, const GameState& state,
                                         Action action) const;

  // All offsets (mover frame) any image of any feature inspects, per anchor.
  std::vector<Coord> neighbourhood(Anchor anchor) const;

  std::string serialize() const;
  static FeatureSet deserialize(std::string_view text, const Game& game);

 private:
  struct Compiled {
    FeatureSpec spec;
    FeatureSpec key;
    std::vector<FeatureSpec> images;
  };

  bool image_matches(const Game& game, const GameState& state, int anchor_cell,
                     const FeatureSpec& image) const;

  std::vector<Transform> symmetries_{Transform{}};
  bool player_oriented_ = false;
  bool placement_only_ = true;
  std::vector<Compiled> features_;
  int version_ = 0;
};

// Single-element specs at every offset within lattice distance 1 of the
// anchor (the anchor included), for each content type, deduplicated under the
// game's symmetries. Movement games get the same set anchored at the source.
FeatureSet atomic_features(const Game& game);
FeatureSet atomic_features(std::string_view game_id);

// Memoising extractor for hot loops. Results are keyed by the contents of the
// neighbourhood cells the feature set inspects, so repeated local patterns are
// matched only once. Not thread-safe; use one per search.
class FeatureEvaluator {
 public:
  FeatureEvaluator(const Game& game, const FeatureSet& features);

  std::span<const int> active(const GameState& state, Action action);
  int dimension() const { return features_->size(); }

 private:
  std::uint64_t key(const GameState& state, Action action) const;

  const Game* game_;
  const FeatureSet* features_;
  std::vector<Coord> to_offsets_;
  std::vector<Coord> from_offsets_;
  bool cacheable_ = false;
  std::unordered_map<std::uint64_t, std::vector<int>> cache_;
  std::vector<int> scratch_;
};

}  // namespace tspg
