#pragma once

#include <vector>

#include "tspg/features.hpp"
#include "tspg/game.hpp"

namespace tspg {

// Probabilities aligned with a legal-action list.
struct ActionDistribution {
  std::vector<double> probabilities;

  std::size_t size() const { return probabilities.size(); }
  double operator[](std::size_t i) const { return probabilities[i]; }
  double sum() const;
};

// One self-play training sample: a state, the search's visit distribution
// over its legal actions, and the search's value estimate for every action.
struct ExperienceEntry {
  GameState state;
  std::vector<Action> actions;
  // Frozen at collection time, so dimensions may lag the current feature set.
  std::vector<SparseFeatureVector> features;
  ActionDistribution visit_distribution;
  std::vector<double> q_values;
  int feature_version = 0;
};

}  // namespace tspg
