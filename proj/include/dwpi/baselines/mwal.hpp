#pragma once

#include <span>
#include <vector>

#include "dwpi/baselines/trainers.hpp"

namespace dwpi::baselines {

/// Per-element factor (1 + sqrt(2 ln k / N))^-(mu_n - mu_E_n) applied to
/// omega, before renormalization. mu and mu_e must already be scaled.
std::vector<double> mwal_multiply(std::span<const double> omega, std::span<const double> mu,
                                  std::span<const double> mu_e, int total_iterations);

/// mwal_multiply followed by renormalization to the simplex. The cooperative
/// flag of omega is kept.
PreferenceVector mwal_update(const PreferenceVector& omega, std::span<const double> mu, std::span<const double> mu_e,
                             int total_iterations);

/// Starts from the uniform preference (or cfg.initial), trains an agent for the
/// current preference each iteration, and stops once the scaled
/// ||mu - mu_E||_inf drops below epsilon.
BaselineResult run_mwal(envs::Environment& env, std::span<const Trajectory> expert_demos, const AgentTrainer& trainer,
                        const FeatureScaler& scaler, const SearchConfig& cfg, std::uint64_t seed);

}  // namespace dwpi::baselines
