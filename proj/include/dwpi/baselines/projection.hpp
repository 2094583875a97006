#pragma once

#include <span>
#include <vector>

#include "dwpi/baselines/trainers.hpp"

namespace dwpi::baselines {

/// Moves mu_bar towards mu_E along the line through mu_bar and mu, by
/// orthogonal projection with the step clamped to [0, 1]. The distance to
/// mu_E never increases.
std::vector<double> project_mu_bar(std::span<const double> mu_bar, std::span<const double> mu,
                                   std::span<const double> mu_e);

/// mu_E - mu_bar with negatives clamped to zero, renormalized; uniform if
/// nothing positive remains.
PreferenceVector projection_direction(std::span<const double> mu_e, std::span<const double> mu_bar,
                                      std::optional<bool> cooperative_flag);

/// Projection-method apprenticeship learning. The first preference is drawn
/// uniformly from the simplex (or cfg.initial); later ones point from mu_bar to
/// mu_E. Stops once ||mu_E - mu_bar||_2 <= epsilon in scaled units. `best` is
/// the trained preference whose own mu lies closest to mu_E.
BaselineResult run_pm(envs::Environment& env, std::span<const Trajectory> expert_demos, const AgentTrainer& trainer,
                      const FeatureScaler& scaler, const SearchConfig& cfg, std::uint64_t seed);

}  // namespace dwpi::baselines
