#include "tspg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tspg {
namespace {

constexpr double kProbabilityFloor = 1e-300;

void check_dimensions(const PolicySpec& policy, std::span<const SparseFeatureVector> features) {
  if (policy.offset && policy.offset->size() != policy.base.size()) {
    throw std::invalid_argument("offset and base weights differ in length");
  }
  for (const auto& f : features) {
    if (static_cast<std::size_t>(f.dimension) > policy.dimension() ||
        (!f.active.empty() && static_cast<std::size_t>(f.active.back()) >= policy.dimension())) {
      throw std::invalid_argument("feature dimension " + std::to_string(f.dimension) +
                                  " exceeds parameter length " +
                                  std::to_string(policy.dimension()));
    }
  }
}

ActionDistribution entry_policy(const PolicySpec& policy, const ExperienceEntry& entry) {
  const auto z = logits(policy, entry.features);
  return softmax(z);
}

void check_entry(const ExperienceEntry& entry) {
  if (entry.features.size() != entry.visit_distribution.size() || entry.features.empty()) {
    throw std::invalid_argument("visit distribution is not aligned with the action list");
  }
}

}  // namespace

double ActionDistribution::sum() const {
  return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

void ParameterVector::extend_to(std::size_t size) {
  if (size > values_.size()) values_.resize(size, 0.0);
}

bool ParameterVector::all_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

std::vector<double> PolicySpec::effective_weights() const {
  std::vector<double> w(base.values().begin(), base.values().end());
  if (offset) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += (*offset)[i];
  }
  return w;
}

void PolicySpec::extend_to(std::size_t size) {
  base.extend_to(size);
  if (offset) offset->extend_to(size);
}

double logit(std::span<const double> weights, std::span<const int> active) {
  double z = 0.0;
  for (int i : active) z += weights[static_cast<std::size_t>(i)];
  return z;
}

std::vector<double> logits(const PolicySpec& policy, std::span<const SparseFeatureVector> features) {
  check_dimensions(policy, features);
  std::vector<double> z;
  z.reserve(features.size());
  for (const auto& f : features) {
    double sum = 0.0;
    for (int i : f.active) sum += policy.weight(static_cast<std::size_t>(i));
    z.push_back(sum);
  }
  return z;
}

ActionDistribution softmax(std::span<const double> logits) {
  ActionDistribution d;
  if (logits.empty()) return d;
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  d.probabilities.resize(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    d.probabilities[i] = std::exp(logits[i] - max_logit);
    total += d.probabilities[i];
  }
  for (double& p : d.probabilities) p /= total;
  return d;
}

ActionDistribution distribution(const PolicySpec& policy, const Game& game, const GameState& state,
                                std::span<const Action> actions, const FeatureSet& features) {
  std::vector<SparseFeatureVector> phi;
  phi.reserve(actions.size());
  for (Action a : actions) phi.push_back(features.extract(game, state, a));
  return softmax(logits(policy, phi));
}

std::vector<double> probability_gradient(const PolicySpec& policy,
                                         std::span<const SparseFeatureVector> features,
                                         std::size_t action) {
  const ActionDistribution pi = softmax(logits(policy, features));
  std::vector<double> grad(policy.dimension(), 0.0);
  for (std::size_t b = 0; b < features.size(); ++b) {
    const double coeff = pi[action] * ((b == action ? 1.0 : 0.0) - pi[b]);
    for (int i : features[b].active) grad[static_cast<std::size_t>(i)] += coeff;
  }
  return grad;
}

double cross_entropy_loss(const PolicySpec& policy, const ExperienceEntry& entry) {
  check_entry(entry);
  const ActionDistribution pi = entry_policy(policy, entry);
  double loss = 0.0;
  for (std::size_t a = 0; a < pi.size(); ++a) {
    loss -= entry.visit_distribution[a] * std::log(std::max(pi[a], kProbabilityFloor));
  }
  return loss;
}

std::vector<double> ce_gradient(const PolicySpec& policy, const ExperienceEntry& entry) {
  check_entry(entry);
  if (std::abs(entry.visit_distribution.sum() - 1.0) > 1e-6) {
    throw std::invalid_argument("visit distribution does not sum to 1");
  }
  const ActionDistribution pi = entry_policy(policy, entry);
  std::vector<double> grad(policy.dimension(), 0.0);
  for (std::size_t a = 0; a < pi.size(); ++a) {
    const double coeff = pi[a] - entry.visit_distribution[a];
    for (int i : entry.features[a].active) grad[static_cast<std::size_t>(i)] += coeff;
  }
  return grad;
}

std::vector<double> ce_gradient(const PolicySpec& policy,
                                std::span<const ExperienceEntry* const> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<double> grad(policy.dimension(), 0.0);
  for (const ExperienceEntry* entry : batch) {
    const auto g = ce_gradient(policy, *entry);
    for (std::size_t i = 0; i < g.size(); ++i) grad[i] += g[i];
  }
  for (double& g : grad) g /= static_cast<double>(batch.size());
  return grad;
}

std::vector<double> tspg_gradient(const PolicySpec& policy,
                                  std::span<const ExperienceEntry* const> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<double> grad(policy.dimension(), 0.0);
  for (const ExperienceEntry* entry : batch) {
    if (entry->q_values.size() != entry->features.size() || entry->features.empty()) {
      throw std::invalid_argument("entry is missing value estimates for some actions");
    }
    const ActionDistribution pi = entry_policy(policy, *entry);
    // sum_a grad pi(a) Q(a) = sum_a pi(a) (Q(a) - sum_b pi(b) Q(b)) phi(a)
    double mean_q = 0.0;
    for (std::size_t a = 0; a < pi.size(); ++a) mean_q += pi[a] * entry->q_values[a];
    for (std::size_t a = 0; a < pi.size(); ++a) {
      const double coeff = pi[a] * (entry->q_values[a] - mean_q);
      for (int i : entry->features[a].active) grad[static_cast<std::size_t>(i)] += coeff;
    }
  }
  for (double& g : grad) g /= static_cast<double>(batch.size());
  return grad;
}

std::vector<double> tspg_gradient(const PolicySpec& policy, std::span<const ExperienceEntry> batch) {
  std::vector<const ExperienceEntry*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& e : batch) ptrs.push_back(&e);
  return tspg_gradient(policy, std::span<const ExperienceEntry* const>(ptrs));
}

std::size_t sample_action(const ActionDistribution& dist, Rng& rng) {
  if (dist.size() == 0) throw std::invalid_argument("empty distribution");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double u = uniform(rng) * dist.sum();
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= 0.0) continue;
    last_positive = i;
    if (u < dist[i]) return i;
    u -= dist[i];
  }
  return last_positive;
}

std::size_t greedy_action(const ActionDistribution& dist) {
  if (dist.size() == 0) throw std::invalid_argument("empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.size(); ++i)
    if (dist[i] > dist[best]) best = i;
  return best;
}

}  // namespace tspg
