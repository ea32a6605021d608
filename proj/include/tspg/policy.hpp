#pragma once

// Softmax policies that are linear in sparse binary features.
//
// A PolicySpec holds base weights and optional offset weights; the logit of an
// action is the sum over its active features of base + offset. Training the
// offsets against frozen base weights lets a low-entropy objective start from
// an exploratory policy instead of from zero.

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tspg/experience.hpp"
#include "tspg/features.hpp"
#include "tspg/game.hpp"

namespace tspg {

using Rng = std::mt19937_64;

class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::size_t size) : values_(size, 0.0) {}
  explicit ParameterVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  // New slots start at exactly zero. Never shrinks.
  void extend_to(std::size_t size);
  bool all_zero() const;

  bool operator==(const ParameterVector&) const = default;

 private:
  std::vector<double> values_;
};

struct PolicySpec {
  ParameterVector base;
  std::optional<ParameterVector> offset;

  std::size_t dimension() const { return base.size(); }
  double weight(std::size_t i) const { return base[i] + (offset ? (*offset)[i] : 0.0); }
  std::vector<double> effective_weights() const;
  void extend_to(std::size_t size);
};

// Throws std::invalid_argument if a feature index exceeds the parameter length.
std::vector<double> logits(const PolicySpec& policy, std::span<const SparseFeatureVector> features);
double logit(std::span<const double> weights, std::span<const int> active);

// Max-subtracted softmax.
ActionDistribution softmax(std::span<const double> logits);

ActionDistribution distribution(const PolicySpec& policy, const Game& game, const GameState& state,
                                std::span<const Action> actions, const FeatureSet& features);

// d pi(s, a) / d theta_i = pi(s, a) * sum_b (delta_ab - pi(s, b)) * phi_i(s, b),
// for every parameter i.
std::vector<double> probability_gradient(const PolicySpec& policy,
                                         std::span<const SparseFeatureVector> features,
                                         std::size_t action);

// Cross-entropy loss -M_s . log pi(s) with probabilities floored at 1e-300.
double cross_entropy_loss(const PolicySpec& policy, const ExperienceEntry& entry);

// Gradient of cross_entropy_loss with respect to the logit weights (base or
// offset alike): sum_a (pi(s, a) - M_s(a)) phi(s, a). Descent direction.
// Throws std::invalid_argument if the visit distribution does not sum to 1
// within 1e-6.
std::vector<double> ce_gradient(const PolicySpec& policy, const ExperienceEntry& entry);

// Mean over the batch of sum_a grad pi(s, a) * Q(s, a). Ascent direction.
// Throws std::invalid_argument on an empty batch or missing value estimates.
std::vector<double> tspg_gradient(const PolicySpec& policy,
                                  std::span<const ExperienceEntry* const> batch);
std::vector<double> tspg_gradient(const PolicySpec& policy,
                                  std::span<const ExperienceEntry> batch);

// Batch mean of ce_gradient.
std::vector<double> ce_gradient(const PolicySpec& policy,
                                std::span<const ExperienceEntry* const> batch);

std::size_t sample_action(const ActionDistribution& dist, Rng& rng);
// Lowest index among the maxima.
std::size_t greedy_action(const ActionDistribution& dist);

}  // namespace tspg
