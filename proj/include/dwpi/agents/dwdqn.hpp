#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dwpi/agents/agent.hpp"
#include "dwpi/nn/adam.hpp"
#include "dwpi/nn/mlp.hpp"

namespace dwpi::agents {

/// Observations are mostly zeros, so transitions keep only the non-zero entries.
struct SparseObservation {
  std::vector<std::pair<std::uint32_t, double>> entries;

  static SparseObservation from_dense(std::span<const double> dense);
  void scatter(std::span<double> dense) const;
};

struct Transition {
  SparseObservation state;
  int action = 0;
  SparseObservation next_state;
  double reward = 0.0;           // scalarized with the episode's preference
  std::vector<double> weights;  // effective weights of that preference
  bool terminal = false;
  RewardVector reward_vector;  // unscalarized, for relabelling
};

/// Fixed-capacity ring buffer with uniform sampling.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_.at(i); }
  std::vector<std::size_t> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

/// Q-network over [observation, effective weights] with one output per action.
class DwdqnAgent final : public Agent {
 public:
  DwdqnAgent(std::size_t observation_size, std::size_t objective_count, AgentHyperparams hp, Rng& rng);
  /// Wraps a trained network (for loading).
  DwdqnAgent(std::size_t observation_size, std::size_t objective_count, AgentHyperparams hp, nn::Mlp online);

  std::size_t observation_size() const { return obs_size_; }
  std::size_t objective_count() const { return objectives_; }
  const AgentHyperparams& hyperparams() const { return hp_; }
  const nn::Mlp& online() const { return online_; }
  const nn::Mlp& target() const { return target_; }
  const ReplayMemory& replay() const { return replay_; }
  long gradient_steps() const { return gradient_steps_; }

  std::vector<double> q_values(std::span<const double> observation, const PreferenceVector& pref) const;
  int greedy_action(std::span<const double> observation, std::span<const double> weights) const;
  int greedy_action(const envs::Environment& env, const PreferenceVector& pref) const override;
  std::string kind() const override { return "dwdqn"; }

  void remember(Transition t) { replay_.push(std::move(t)); }
  /// One minibatch update from replay; returns the batch loss. With a
  /// sampler, hp.relabel_fraction of the batch is rescored under preferences
  /// drawn from it.
  double learn(Rng& rng, const PreferenceSampler* relabel = nullptr);

 private:
  nn::Vector input(std::span<const double> observation, std::span<const double> weights) const;

  std::size_t obs_size_;
  std::size_t objectives_;
  AgentHyperparams hp_;
  nn::Mlp online_;
  nn::Mlp target_;
  nn::Adam opt_;
  ReplayMemory replay_;
  long gradient_steps_ = 0;
};

struct TrainingLog {
  std::vector<double> episode_utility;  // scalarized return under the episode's preference
  std::vector<double> loss;             // mean batch loss per learning episode
};

/// Deep Q-learning with a fresh preference drawn from sampler every episode.
/// Learning starts after hp.threshold episodes; each later episode is followed
/// by hp.updates_per_episode minibatch updates.
DwdqnAgent train_dwdqn(envs::Environment& env, const AgentHyperparams& hp, const PreferenceSampler& sampler,
                       std::uint64_t seed, TrainingLog* log = nullptr);

}  // namespace dwpi::agents
