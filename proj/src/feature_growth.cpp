#include "tspg/feature_growth.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace tspg {
namespace {

std::optional<FeatureSpec> merge(const FeatureSpec& a, const FeatureSpec& b) {
  if (a.anchor != b.anchor) return std::nullopt;
  std::map<std::pair<int, int>, CellContent> cells;
  for (const auto* spec : {&a, &b}) {
    for (const auto& e : spec->elements) {
      auto [it, inserted] = cells.emplace(std::pair{e.dx, e.dy}, e.content);
      if (!inserted && it->second != e.content) return std::nullopt;
    }
  }
  std::vector<PatternElement> elements;
  for (const auto& [offset, content] : cells) elements.push_back({offset.first, offset.second, content});
  return FeatureSpec::make(a.anchor, std::move(elements));
}

}  // namespace

FeatureSet grow(const FeatureSet& features, const Game& game,
                std::span<const ExperienceEntry> recent) {
  if (recent.empty()) throw ContractViolation("feature growth needs at least one entry");

  std::map<FeatureSpec, int> scores;
  for (const ExperienceEntry& entry : recent) {
    if (entry.q_values.empty() || entry.q_values.size() != entry.actions.size()) continue;
    const auto best = static_cast<std::size_t>(
        std::max_element(entry.q_values.begin(), entry.q_values.end()) - entry.q_values.begin());
    const auto found = features.instances(game, entry.state, entry.actions[best]);
    std::set<FeatureSpec> seen;
    for (std::size_t i = 0; i < found.size(); ++i) {
      for (std::size_t j = i + 1; j < found.size(); ++j) {
        auto merged = merge(found[i].image, found[j].image);
        if (!merged) continue;
        FeatureSpec key = features.canonical(*merged);
        if (key.elements.empty() || features.contains(key)) continue;
        if (seen.insert(key).second) ++scores[key];
      }
    }
  }

  const FeatureSpec* best = nullptr;
  int best_score = 0;
  for (const auto& [key, score] : scores) {
    if (score > best_score) {
      best = &key;
      best_score = score;
    }
  }
  if (!best) return features;
  return features.with_feature(*best);
}

}  // namespace tspg
