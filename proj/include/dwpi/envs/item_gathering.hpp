#pragma once

#include "dwpi/envs/environment.hpp"

namespace dwpi::envs {

/// Item Gathering with a scripted second agent that only wants red items.
/// Objectives: [steps, wall hitting, green, red, yellow, other-agent
/// collection]. Item positions are re-sampled every episode.
class ItemGatheringEnv final : public Environment {
 public:
  static constexpr int kNoItem = -1;

  explicit ItemGatheringEnv(EnvSpec spec);

  std::uint64_t reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  std::uint64_t state_id() const override;
  std::size_t observation_size() const override;
  void observe(std::span<double> out) const override;
  std::vector<double> return_upper_bound() const override;
  std::unique_ptr<Environment> clone() const override;

  Position agent() const { return agent_; }
  Position other() const { return other_; }
  /// Item colour per cell (ItemColor as int) or kNoItem.
  const std::vector<int>& items() const { return items_; }
  int remaining_items() const;

 private:
  std::vector<int> bfs_distances(Position from) const;
  void move_other_agent();

  std::vector<int> items_;
  Position agent_;
  Position other_;
  Rng rng_;
};

}  // namespace dwpi::envs
