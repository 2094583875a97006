#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwpi/agents/agent.hpp"
#include "dwpi/baselines/feature_expectation.hpp"

namespace dwpi::baselines {

/// Trains (or supplies) a policy for one preference. Both baselines and DWPI
/// go through the same trainer so they share the RL substrate.
using AgentTrainer = std::function<std::shared_ptr<const agents::Agent>(const PreferenceVector&, std::uint64_t seed)>;

/// Fresh DWTQ run with a single table for the given preference.
AgentTrainer dwtq_trainer(envs::EnvSpec spec, agents::AgentHyperparams hp);
/// Fresh DWDQN run with the preference held fixed for every episode.
AgentTrainer dwdqn_trainer(envs::EnvSpec spec, agents::AgentHyperparams hp);
/// Reuses an already trained dynamic-weight agent, which conditions on the
/// preference directly.
AgentTrainer shared_agent_trainer(std::shared_ptr<const agents::Agent> agent);

/// Settings shared by PM and MWAL.
struct SearchConfig {
  int max_iterations = 20;             // N
  double epsilon = 0.05;               // in scaled feature units
  int mu_episodes = 10;                // rollouts per feature-expectation estimate
  double gamma = 1.0;
  std::optional<double> time_budget_ms;  // stop after the iteration that crosses it
  std::optional<PreferenceVector> initial;
  std::optional<bool> cooperative_flag;  // attached to every candidate

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  double residual = 0.0;
  PreferenceVector omega;  // preference trained in this iteration
  double ms = 0.0;         // wall-clock of this iteration
};

struct BaselineResult {
  PreferenceVector best;   // lowest residual seen
  PreferenceVector final;  // preference after the last update
  bool converged = false;
  std::vector<IterationRecord> log;
};

/// iteration,residual,w0,...,w{k-1},ms
std::string format_iteration_log(std::span<const IterationRecord> log);

}  // namespace dwpi::baselines
