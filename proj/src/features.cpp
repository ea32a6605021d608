#include "tspg/features.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tspg {
namespace {

CellContent content_at(const Game& game, const GameState& state, int anchor_cell, int dx, int dy,
                       bool flip) {
  const Coord origin = game.geometry().coord(anchor_cell);
  const int cell = game.geometry().cell_at(origin.x + dx, origin.y + (flip ? -dy : dy));
  if (cell < 0) return CellContent::kOffBoard;
  const std::int8_t v = state.at(cell);
  if (v == kEmptyCell) return CellContent::kEmpty;
  return v == stone_of(state.mover()) ? CellContent::kFriend : CellContent::kEnemy;
}

int anchor_cell_of(Anchor anchor, Action action) {
  return anchor == Anchor::kTo ? action.to : action.from;
}

FeatureSpec transformed(const FeatureSpec& spec, const Transform& t) {
  std::vector<PatternElement> elements;
  elements.reserve(spec.elements.size());
  for (const auto& e : spec.elements) {
    const Coord p = t.apply({e.dx, e.dy});
    elements.push_back({p.x, p.y, e.content});
  }
  std::sort(elements.begin(), elements.end());
  return {spec.anchor, std::move(elements)};
}

CellContent parse_content(std::string_view name) {
  if (name == "empty") return CellContent::kEmpty;
  if (name == "friend") return CellContent::kFriend;
  if (name == "enemy") return CellContent::kEnemy;
  if (name == "off") return CellContent::kOffBoard;
  throw std::invalid_argument("unknown cell content '" + std::string(name) + "'");
}

}  // namespace

std::string_view content_name(CellContent c) {
  switch (c) {
    case CellContent::kEmpty: return "empty";
    case CellContent::kFriend: return "friend";
    case CellContent::kEnemy: return "enemy";
    case CellContent::kOffBoard: return "off";
  }
  return "?";
}

FeatureSpec FeatureSpec::make(Anchor anchor, std::vector<PatternElement> elements) {
  if (elements.empty()) throw std::invalid_argument("feature spec needs at least one element");
  std::sort(elements.begin(), elements.end());
  for (std::size_t i = 1; i < elements.size(); ++i) {
    if (elements[i].dx == elements[i - 1].dx && elements[i].dy == elements[i - 1].dy) {
      throw std::invalid_argument("feature spec repeats an offset");
    }
  }
  return {anchor, std::move(elements)};
}

std::string to_string(const FeatureSpec& spec) {
  std::ostringstream os;
  if (spec.anchor == Anchor::kFrom) os << "from ";
  for (std::size_t i = 0; i < spec.elements.size(); ++i) {
    const auto& e = spec.elements[i];
    if (i) os << ' ';
    os << '(' << e.dx << ',' << e.dy << ':' << content_name(e.content) << ')';
  }
  return os.str();
}

FeatureSpec parse_feature_spec(std::string_view line) {
  Anchor anchor = Anchor::kTo;
  std::size_t pos = line.find_first_not_of(' ');
  if (pos != std::string_view::npos && line.substr(pos, 4) == "from") {
    anchor = Anchor::kFrom;
    pos += 4;
  }
  std::vector<PatternElement> elements;
  while (true) {
    const std::size_t open = line.find('(', pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = line.find(')', open);
    if (close == std::string_view::npos) throw std::invalid_argument("unterminated element");
    const std::string body(line.substr(open + 1, close - open - 1));
    const std::size_t comma = body.find(','), colon = body.find(':');
    if (comma == std::string::npos || colon == std::string::npos || colon < comma) {
      throw std::invalid_argument("malformed element '(" + body + ")'");
    }
    elements.push_back({std::stoi(body.substr(0, comma)),
                        std::stoi(body.substr(comma + 1, colon - comma - 1)),
                        parse_content(body.substr(colon + 1))});
    pos = close + 1;
  }
  return FeatureSpec::make(anchor, std::move(elements));
}

bool SparseFeatureVector::is_active(int index) const {
  return std::binary_search(active.begin(), active.end(), index);
}

FeatureSet FeatureSet::empty_for(const Game& game) {
  FeatureSet fs;
  fs.symmetries_.assign(game.symmetries().begin(), game.symmetries().end());
  fs.player_oriented_ = game.player_oriented();
  fs.placement_only_ = game.placement_only();
  return fs;
}

FeatureSpec FeatureSet::canonical(const FeatureSpec& spec) const {
  FeatureSpec stripped = spec;
  if (placement_only_ && spec.anchor == Anchor::kTo) {
    std::erase(stripped.elements, PatternElement{0, 0, CellContent::kEmpty});
  }
  FeatureSpec best;
  bool first = true;
  for (const auto& t : symmetries_) {
    FeatureSpec image = transformed(stripped, t);
    if (first || image < best) {
      best = std::move(image);
      first = false;
    }
  }
  return best;
}

bool FeatureSet::contains(const FeatureSpec& spec) const {
  const FeatureSpec key = canonical(spec);
  return std::any_of(features_.begin(), features_.end(),
                     [&](const Compiled& c) { return c.key == key; });
}

FeatureSet FeatureSet::with_feature(FeatureSpec spec) const {
  spec = FeatureSpec::make(spec.anchor, std::move(spec.elements));
  if (contains(spec)) throw std::invalid_argument("duplicate feature " + to_string(spec));
  FeatureSet next = *this;
  Compiled compiled{spec, canonical(spec), {}};
  std::set<FeatureSpec> images;
  for (const auto& t : symmetries_) images.insert(transformed(spec, t));
  compiled.images.assign(images.begin(), images.end());
  next.features_.push_back(std::move(compiled));
  next.version_ = version_ + 1;
  return next;
}

bool FeatureSet::image_matches(const Game& game, const GameState& state, int anchor_cell,
                               const FeatureSpec& image) const {
  const bool flip = player_oriented_ && state.mover() == Player::kP2;
  for (const auto& e : image.elements) {
    if (content_at(game, state, anchor_cell, e.dx, e.dy, flip) != e.content) return false;
  }
  return true;
}

void FeatureSet::extract_into(const Game& game, const GameState& state, Action action,
                              std::vector<int>& active) const {
  active.clear();
  for (int i = 0; i < size(); ++i) {
    const Compiled& f = features_[static_cast<std::size_t>(i)];
    const int anchor = anchor_cell_of(f.spec.anchor, action);
    if (anchor < 0) continue;
    for (const auto& image : f.images) {
      if (image_matches(game, state, anchor, image)) {
        active.push_back(i);
        break;
      }
    }
  }
}

SparseFeatureVector FeatureSet::extract(const Game& game, const GameState& state,
                                        Action action) const {
  SparseFeatureVector v;
  v.dimension = size();
  extract_into(game, state, action, v.active);
  return v;
}

std::vector<FeatureInstance> FeatureSet::instances(const Game& game, const GameState& state,
                                                   Action action) const {
  std::vector<FeatureInstance> out;
  for (int i = 0; i < size(); ++i) {
    const Compiled& f = features_[static_cast<std::size_t>(i)];
    const int anchor = anchor_cell_of(f.spec.anchor, action);
    if (anchor < 0) continue;
    for (const auto& image : f.images) {
      if (image_matches(game, state, anchor, image)) out.push_back({i, image});
    }
  }
  return out;
}

std::vector<Coord> FeatureSet::neighbourhood(Anchor anchor) const {
  std::set<Coord> offsets;
  for (const auto& f : features_) {
    if (f.spec.anchor != anchor) continue;
    for (const auto& image : f.images)
      for (const auto& e : image.elements) offsets.insert({e.dx, e.dy});
  }
  return {offsets.begin(), offsets.end()};
}

std::string FeatureSet::serialize() const {
  std::string out;
  for (const auto& f : features_) {
    out += to_string(f.spec);
    out += '\n';
  }
  return out;
}

FeatureSet FeatureSet::deserialize(std::string_view text, const Game& game) {
  FeatureSet fs = empty_for(game);
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (line.find('(') != std::string_view::npos) fs = fs.with_feature(parse_feature_spec(line));
    start = end + 1;
  }
  return fs;
}

FeatureSet atomic_features(const Game& game) {
  std::vector<Coord> offsets;
  if (game.geometry().lattice() == Lattice::kSquare) {
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) offsets.push_back({dx, dy});
  } else {
    offsets = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
  }
  constexpr CellContent kContents[] = {CellContent::kEmpty, CellContent::kFriend,
                                       CellContent::kEnemy, CellContent::kOffBoard};
  std::vector<Anchor> anchors{Anchor::kTo};
  if (!game.placement_only()) anchors.push_back(Anchor::kFrom);

  FeatureSet fs = FeatureSet::empty_for(game);
  for (Anchor anchor : anchors) {
    for (const Coord& o : offsets) {
      for (CellContent content : kContents) {
        FeatureSpec spec = FeatureSpec::make(anchor, {{o.x, o.y, content}});
        if (!fs.contains(spec)) fs = fs.with_feature(std::move(spec));
      }
    }
  }
  return fs;
}

FeatureSet atomic_features(std::string_view game_id) { return atomic_features(*make_game(game_id)); }

FeatureEvaluator::FeatureEvaluator(const Game& game, const FeatureSet& features)
    : game_(&game),
      features_(&features),
      to_offsets_(features.neighbourhood(Anchor::kTo)),
      from_offsets_(features.neighbourhood(Anchor::kFrom)) {
  cacheable_ = 2 * (to_offsets_.size() + from_offsets_.size()) + 1 <= 64;
}

std::uint64_t FeatureEvaluator::key(const GameState& state, Action action) const {
  const bool flip = game_->player_oriented() && state.mover() == Player::kP2;
  std::uint64_t k = 0;
  for (const Coord& o : to_offsets_) {
    k = (k << 2) | static_cast<std::uint64_t>(content_at(*game_, state, action.to, o.x, o.y, flip));
  }
  if (action.from >= 0) {
    for (const Coord& o : from_offsets_) {
      k = (k << 2) |
          static_cast<std::uint64_t>(content_at(*game_, state, action.from, o.x, o.y, flip));
    }
    k = (k << 1) | 1u;
  } else {
    k <<= 1;
  }
  return k;
}

std::span<const int> FeatureEvaluator::active(const GameState& state, Action action) {
  if (!cacheable_) {
    features_->extract_into(*game_, state, action, scratch_);
    return scratch_;
  }
  const std::uint64_t k = key(state, action);
  auto it = cache_.find(k);
  if (it == cache_.end()) {
    if (cache_.size() > (1u << 20)) cache_.clear();
    std::vector<int> active;
    features_->extract_into(*game_, state, action, active);
    it = cache_.emplace(k, std::move(active)).first;
  }
  return it->second;
}

}  // namespace tspg
