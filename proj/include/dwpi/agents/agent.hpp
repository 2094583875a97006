#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dwpi/core.hpp"
#include "dwpi/envs/environment.hpp"
#include "dwpi/seeding.hpp"

namespace dwpi::agents {

struct AgentHyperparams {
  // Shared (Algorithm-level) settings.
  double alpha = 1.0;  // tabular learning rate
  double gamma = 1.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;  // share of episodes over which epsilon decays linearly
  int episodes = 3000;                  // per preference for DWTQ, total for DWDQN
  int max_steps = 0;                    // per episode; 0 uses the environment limit

  // DWDQN only.
  std::size_t replay_capacity = 50000;
  std::size_t batch_size = 32;
  int target_sync = 200;  // gradient steps between target-network copies
  int threshold = 50;     // episodes before replay learning starts
  int updates_per_episode = 16;
  std::vector<std::size_t> hidden = {128, 128};
  double learning_rate = 5e-4;
  bool double_q = true;
  double relabel_fraction = 0.0;  // share of replayed transitions rescored under a freshly sampled preference

  void validate() const;
};

/// Linear decay from epsilon_start to epsilon_end over the first
/// epsilon_decay_fraction of the episodes, constant afterwards.
double epsilon_at(const AgentHyperparams& hp, int episode);

/// A dynamic-weight policy: acts greedily for whatever preference it is given.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual int greedy_action(const envs::Environment& env, const PreferenceVector& pref) const = 0;
  virtual std::string kind() const = 0;
};

using PreferenceSampler = std::function<PreferenceVector(Rng&)>;

/// Uniform over the simplex (Dirichlet(1,...,1)); optionally attaches a
/// Bernoulli(0.5) cooperative flag.
PreferenceSampler dirichlet_sampler(std::size_t objectives, bool cooperative_flag);
/// Uniform over a fixed list.
PreferenceSampler list_sampler(std::vector<PreferenceVector> prefs);
PreferenceSampler fixed_sampler(PreferenceVector pref);

/// Sampler matching an environment's preference space: Dirichlet for Traffic,
/// Dirichlet plus cooperative flag for Item Gathering.
PreferenceSampler default_sampler(envs::EnvName env);

/// [1 - w, w] for w = 0, step, 2 step, ..., 1 (two-objective environments).
std::vector<PreferenceVector> preference_grid(double step);

/// Greedy episodes (epsilon = 0). Episode e resets the environment with
/// derive_seed(seed, e), so results are reproducible.
std::vector<Trajectory> rollout(const Agent& agent, envs::Environment& env, const PreferenceVector& pref, int episodes,
                                std::uint64_t seed);

}  // namespace dwpi::agents
