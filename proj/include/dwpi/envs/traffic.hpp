#pragma once

#include "dwpi/envs/environment.hpp"

namespace dwpi::envs {

/// Traffic gridworld. Objectives: [steps, item collection, traffic rules,
/// collisions, wall hitting]. Cars move vertically along their road column
/// and reverse at the end of the road; their initial directions are drawn per
/// episode.
class TrafficEnv final : public Environment {
 public:
  struct Car {
    Position pos;
    int direction = 1;  // +1 down, -1 up

    friend bool operator==(const Car&, const Car&) = default;
  };

  explicit TrafficEnv(EnvSpec spec);

  std::uint64_t reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  std::uint64_t state_id() const override;
  std::size_t observation_size() const override;
  void observe(std::span<double> out) const override;
  std::vector<double> return_upper_bound() const override;
  std::unique_ptr<Environment> clone() const override;

  Position agent() const { return agent_; }
  const std::vector<Car>& cars() const { return cars_; }
  const std::vector<bool>& collected() const { return collected_; }

  /// Moves a car one cell, bouncing off the end of its road.
  static void advance_car(const GridLayout& grid, Car& car);

 private:
  Position agent_;
  std::vector<Car> cars_;
  std::vector<bool> collected_;
  Rng rng_;
};

}  // namespace dwpi::envs
