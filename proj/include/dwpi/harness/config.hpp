#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dwpi/agents/agent.hpp"
#include "dwpi/baselines/trainers.hpp"
#include "dwpi/metrics/metrics.hpp"
#include "dwpi/pi/dataset.hpp"
#include "dwpi/pi/inference_model.hpp"

namespace dwpi::harness {

/// Malformed or inconsistent configuration (CLI exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AgentKind { Dwtq, Dwdqn };
enum class ExpertSource {
  Fresh,    // a new agent trained at exactly the demonstrated preference
  Trained,  // the experiment's dynamic-weight agent
};
enum class BaselineTrainer { Fresh, Shared };

std::string_view to_string(AgentKind kind);
std::string_view to_string(ExpertSource source);
std::string_view to_string(BaselineTrainer trainer);

struct ExperimentConfig {
  // [experiment]
  envs::EnvName env = envs::EnvName::Cdst;
  AgentKind agent_kind = AgentKind::Dwtq;
  std::optional<std::filesystem::path> grid_file;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "runs/dwpi";

  // [agent]
  agents::AgentHyperparams agent;
  double preference_step = 0.01;  // DWTQ preference grid
  std::optional<std::uint64_t> agent_seed;

  // [dataset]
  pi::DatasetOptions dataset;
  std::optional<std::uint64_t> dataset_seed;

  // [inference]
  pi::InferenceConfig inference;
  std::optional<std::uint64_t> inference_seed;

  // [baselines]
  std::vector<std::string> baselines = {"pm", "mwal"};
  baselines::SearchConfig search;
  BaselineTrainer baseline_trainer = BaselineTrainer::Fresh;
  int baseline_agent_episodes = 0;  // episodes per fresh baseline agent; 0 uses [agent] episodes
  int scaler_episodes = 1000;
  bool matched_time_budget = false;  // cap baselines at DWPI's training time

  // [metrics]
  metrics::KlOrder kl_order = metrics::KlOrder::TruthToInferred;
  metrics::UtilityConvention utility_convention = metrics::UtilityConvention::TrueWeights;
  int utility_episodes = 100;

  // [evaluation]
  int demo_episodes = 10;
  int truths_per_treasure = 1;  // CDST ground-truth preferences drawn per treasure interval
  ExpertSource expert = ExpertSource::Fresh;
  bool suboptimal = false;
  std::vector<std::string> scenarios;  // empty means all
  std::optional<std::uint64_t> evaluation_seed;

  void validate() const;

  std::uint64_t seed_for(std::string_view stage) const;
  envs::EnvSpec env_spec() const;
};

/// Defaults for an environment: agent kind, expert source and the inference
/// learning rate follow the environment.
ExperimentConfig default_config(envs::EnvName env);

/// INI text with sections [experiment], [agent], [dataset], [inference],
/// [baselines], [metrics] and [evaluation]. Unknown keys are errors. Only
/// [experiment] env is required.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every setting as section.key -> canonical text, sorted by key.
std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg);
/// config_entries as key=value lines.
std::string canonical_config(const ExperimentConfig& cfg);

}  // namespace dwpi::harness
