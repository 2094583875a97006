#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dwpi/agents/agent.hpp"

namespace dwpi::baselines {

/// Expected vector return of a policy (mu) or of the expert (mu_E).
struct FeatureExpectation {
  std::vector<double> mu;

  std::size_t size() const { return mu.size(); }
  double operator[](std::size_t i) const { return mu[i]; }
};

/// Mean return of `episodes` greedy rollouts at pref.
FeatureExpectation estimate_mu(const agents::Agent& agent, envs::Environment& env, const PreferenceVector& pref,
                               int episodes, double gamma, std::uint64_t seed);

/// Mean return of the expert's demonstrations.
FeatureExpectation expert_mu(std::span<const Trajectory> demos, double gamma);

/// Returns of uniformly random policies.
std::vector<std::vector<double>> random_policy_returns(envs::Environment& env, int episodes, double gamma,
                                                       std::uint64_t seed);

/// Affine map of each feature element onto [0, 1].
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(std::vector<double> lo, std::vector<double> hi);

  /// Per-element min and max over the given returns, widened to include the
  /// extra points.
  static FeatureScaler from_returns(std::span<const std::vector<double>> returns,
                                    std::span<const std::vector<double>> extra = {});
  /// Bounds from 1,000 random-policy episodes (plus the extra points).
  static FeatureScaler from_random_policy(envs::Environment& env, double gamma, std::uint64_t seed,
                                          std::span<const std::vector<double>> extra = {}, int episodes = 1000);

  std::vector<double> scale(std::span<const double> mu) const;
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }

 private:
  std::vector<double> lo_, hi_;
};

}  // namespace dwpi::baselines
