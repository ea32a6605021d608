#pragma once

#include <span>

#include "tspg/experience.hpp"
#include "tspg/features.hpp"
#include "tspg/game.hpp"

namespace tspg {

// Proposes one more specific feature from recent experience.
//
// For every entry, take the action with the highest stored value estimate
// (lowest index on ties) and list every matched symmetry image of every active
// feature there. Each pair of images with the same anchor is merged into the
// union of their elements. A candidate's score is the number of entries in
// which it arises. The best-scoring candidate that is not already in the set
// (up to symmetry) is appended in canonical form; ties go to the smallest
// canonical form. Returns `features` unchanged when no new candidate exists.
//
// Throws ContractViolation when `recent` is empty.
FeatureSet grow(const FeatureSet& features, const Game& game,
                std::span<const ExperienceEntry> recent);

}  // namespace tspg
