#pragma once

#include "dwpi/envs/environment.hpp"

namespace dwpi::envs {

/// Convex Deep Sea Treasure. Objectives: [time, treasure]. Deterministic.
class CdstEnv final : public Environment {
 public:
  explicit CdstEnv(EnvSpec spec);

  std::uint64_t reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  std::uint64_t state_id() const override;
  std::optional<std::size_t> tabular_state_count() const override;
  std::size_t observation_size() const override;
  void observe(std::span<double> out) const override;
  std::vector<double> return_upper_bound() const override;
  std::unique_ptr<Environment> clone() const override;

  Position position() const { return pos_; }
  /// Index into spec().grid.treasures, or -1 when not on a treasure.
  int treasure_at(Position p) const;

 private:
  std::vector<int> treasure_index_;  // per cell
  Position pos_;
};

}  // namespace dwpi::envs
