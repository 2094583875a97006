#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dwpi/agents/agent.hpp"

namespace dwpi::pi {

/// Sub-optimal demonstrations take k extra steps, k uniform in [min, max],
/// each costing one unit on the time objective.
struct NoiseSpec {
  int extra_steps_min = 1;
  int extra_steps_max = 2;
  std::size_t time_objective_index = 0;

  void validate(std::size_t objective_count) const;
};

struct DatasetOptions {
  std::size_t samples = 20000;
  double noise_fraction = 0.75;
  NoiseSpec noise;
  double gamma = 1.0;
};

struct PiDataset {
  envs::EnvName env = envs::EnvName::Cdst;
  std::vector<std::string> objective_names;
  double gamma = 1.0;
  double noise_fraction = 0.75;
  NoiseSpec noise;

  std::vector<std::vector<double>> features;
  std::vector<PreferenceVector> targets;
  std::vector<bool> noised;  // not persisted

  std::size_t size() const { return features.size(); }
  std::size_t objective_count() const { return objective_names.size(); }
};

/// Subtracts k from the time component.
std::vector<double> apply_noise(std::vector<double> feature, int extra_steps, const NoiseSpec& noise);

/// Appends k idle steps that only carry the time penalty.
Trajectory add_extra_steps(const Trajectory& traj, int extra_steps, const NoiseSpec& noise);

/// Rolls out one greedy episode per sample at a preference drawn from the
/// sampler and records the (possibly noised) return with that preference.
PiDataset generate_dataset(const agents::Agent& agent, envs::Environment& env,
                           const agents::PreferenceSampler& sampler, const DatasetOptions& options,
                           std::uint64_t seed);

/// One header line, then "features|targets[,CF=0|1]" per record.
std::string format_dataset(const PiDataset& ds);
PiDataset parse_dataset(std::string_view text);

void save_dataset(const std::filesystem::path& path, const PiDataset& ds);
PiDataset load_dataset(const std::filesystem::path& path);

}  // namespace dwpi::pi
