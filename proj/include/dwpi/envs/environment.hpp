#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dwpi/core.hpp"
#include "dwpi/envs/grid.hpp"
#include "dwpi/seeding.hpp"

namespace dwpi::envs {

enum class EnvName { Cdst, Traffic, ItemGathering };

std::string_view to_string(EnvName name);
EnvName parse_env_name(std::string_view text);

enum Action : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kActionCount = 4;

Position apply_action(Position p, int action);

struct EnvSpec {
  EnvName name = EnvName::Cdst;
  GridLayout grid;
  std::size_t objective_count = 0;
  std::vector<std::string> objective_names;
  int max_steps = 0;
  std::uint64_t seed = 0;
  int items_per_color = 2;  // Item Gathering only
};

/// Bundled layouts and defaults.
EnvSpec default_spec(EnvName name);
/// Same defaults with the layout replaced by a grid file.
EnvSpec spec_with_grid(EnvName name, GridLayout grid);

struct StepResult {
  std::uint64_t next_state = 0;
  RewardVector reward;
  bool done = false;
  /// True when the episode ended by reaching a terminal state rather than
  /// hitting max_steps.
  bool terminal = false;
};

/// Uniform episodic interface over the three multi-objective gridworlds.
/// Instances are mutable and single-threaded; use clone() per worker.
class Environment {
 public:
  explicit Environment(EnvSpec spec);
  virtual ~Environment() = default;

  const EnvSpec& spec() const { return spec_; }
  EnvName name() const { return spec_.name; }
  std::size_t objective_count() const { return spec_.objective_count; }
  std::size_t time_objective_index() const { return 0; }
  int steps_taken() const { return steps_; }

  virtual std::uint64_t reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;

  virtual std::uint64_t state_id() const = 0;
  /// Number of distinct state ids when the state space is small enough for
  /// tabular methods.
  virtual std::optional<std::size_t> tabular_state_count() const { return std::nullopt; }

  virtual std::size_t observation_size() const = 0;
  virtual void observe(std::span<double> out) const = 0;
  std::vector<double> observation() const;

  /// Upper bound on each objective's undiscounted episode return; used for
  /// optimistic value initialization.
  virtual std::vector<double> return_upper_bound() const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

 protected:
  bool tick();  // counts a step, true once max_steps is reached

  EnvSpec spec_;
  int steps_ = 0;
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);
std::unique_ptr<Environment> make_environment(EnvName name);

}  // namespace dwpi::envs
