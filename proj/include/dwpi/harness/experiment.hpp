#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwpi/baselines/trainers.hpp"
#include "dwpi/harness/config.hpp"
#include "dwpi/metrics/report.hpp"
#include "dwpi/pi/inference_model.hpp"

namespace dwpi::harness {

/// A stage needs an artifact that has not been produced (CLI exit code 2).
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stage failed; the message starts with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageRecord {
  std::string stage;
  std::vector<std::filesystem::path> artifacts;
  std::string key;
  bool cached = false;
  double ms = 0.0;  // time of the run that produced the artifacts
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<StageRecord> stages;
  std::vector<std::filesystem::path> reports;
};

std::string format_manifest(const RunManifest& manifest);
/// Current UTC time as ISO 8601.
std::string utc_timestamp();

/// One ground-truth preference to recover.
struct EvalCase {
  std::string label;  // treasure number (CDST) or scenario slug
  PreferenceVector truth;
  int treasure = 0;   // CDST only
  std::optional<envs::WeightInterval> interval;
};

struct Evaluation {
  std::vector<metrics::EvalReport> reports;
  std::vector<metrics::UtilityComparison> utility;  // parallel to reports
  std::vector<std::filesystem::path> report_files;
  std::vector<std::filesystem::path> log_files;
};

/// Artifact layout and stage execution for one configuration. Every file is
/// written below cfg.output_dir; a stage is skipped when its artifacts exist
/// and their key file matches the hash of (config subset, upstream artifact
/// hashes).
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  std::filesystem::path agent_path() const;
  std::filesystem::path dataset_path() const;
  std::filesystem::path model_path() const;
  std::filesystem::path reports_dir() const;
  std::filesystem::path logs_dir() const;
  std::filesystem::path manifest_path() const;

  StageRecord train_agent();
  StageRecord generate_dataset();
  StageRecord train_inference();
  /// Evaluates DWPI and the configured baselines on every case; writes one
  /// report file (CDST) or one per scenario, and a timings file.
  StageRecord evaluate(Evaluation* out = nullptr);

  std::shared_ptr<const agents::Agent> load_agent() const;
  pi::InferenceModel load_model() const;

  /// CDST: truths_per_treasure preferences per treasure interval; otherwise
  /// the four scenarios. Filtered by cfg.scenarios.
  std::vector<EvalCase> cases() const;
  /// A case by scenario name, or for CDST a treasure number (interval
  /// midpoint) or "w=<treasure weight>".
  EvalCase find_case(const std::string& name) const;

  /// Demonstrations of the case's preference, with extra steps when the
  /// config asks for sub-optimal demos.
  std::vector<Trajectory> demonstrations(const EvalCase& c) const;
  baselines::AgentTrainer baseline_trainer() const;
  baselines::BaselineResult run_baseline(const std::string& method, const EvalCase& c,
                                         std::optional<double> time_budget_ms = std::nullopt) const;

  /// Sum of the recorded agent, dataset and inference stage times.
  double dwpi_training_ms() const;

 private:
  std::string stage_key(const std::string& stage) const;
  bool cached(const std::filesystem::path& key_file, const std::string& key,
              const std::vector<std::filesystem::path>& artifacts, double* ms) const;
  void write_key(const std::filesystem::path& key_file, const std::string& key, double ms) const;
  void require(const std::filesystem::path& artifact, const char* producer) const;

  ExperimentConfig cfg_;
  envs::EnvSpec spec_;
};

/// Runs every stage in order and writes the manifest.
RunManifest run_experiment(const ExperimentConfig& cfg);

/// Hash of every semantically meaningful setting (the output directory is
/// excluded; a grid file counts by content).
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace dwpi::harness
