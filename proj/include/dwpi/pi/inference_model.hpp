#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dwpi/nn/mlp.hpp"
#include "dwpi/pi/dataset.hpp"

namespace dwpi::pi {

struct InferenceConfig {
  std::vector<std::size_t> hidden = {64, 64, 32};
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  int max_epochs = 80;
  // Cosine annealing from learning_rate to zero over all max_epochs, keeping
  // the final parameters. Without it, training early-stops on validation loss
  // and the rate is multiplied by lr_decay after lr_decay_patience epochs
  // without improvement, down to min_learning_rate.
  bool cosine_schedule = true;
  int min_epochs = 60;  // early stopping cannot trigger before this epoch
  int patience = 20;
  double min_delta = 1e-5;
  int lr_decay_patience = 5;
  double lr_decay = 0.5;
  double min_learning_rate = 1e-6;
  double validation_fraction = 0.1;

  void validate() const;
};

/// Learning rate 0.001 for CDST and Traffic, 0.005 for Item Gathering.
InferenceConfig default_inference_config(envs::EnvName env);

/// Regressor from an averaged episode return to a preference vector.
///
/// Inputs are standardized with statistics of the training features. When
/// the environment carries a cooperative flag, the last output is a signed
/// weight and its sign is the flag.
class InferenceModel {
 public:
  InferenceModel() = default;
  InferenceModel(envs::EnvName env, std::vector<double> mean, std::vector<double> scale, nn::Mlp net);

  envs::EnvName env() const { return env_; }
  bool signed_last() const { return env_ == envs::EnvName::ItemGathering; }
  std::size_t objective_count() const { return mean_.size(); }
  const nn::Mlp& network() const { return net_; }
  nn::Mlp& network() { return net_; }

  nn::Vector standardize(std::span<const double> feature) const;
  std::vector<double> raw(std::span<const double> feature) const;
  /// Clamps negatives and renormalizes; a degenerate output maps to uniform.
  PreferenceVector predict(std::span<const double> feature) const;

  std::string serialize() const;
  static InferenceModel deserialize(std::string_view text);

 private:
  envs::EnvName env_ = envs::EnvName::Cdst;
  std::vector<double> mean_;
  std::vector<double> scale_;
  nn::Mlp net_;
};

struct TrainingReport {
  std::vector<double> train_loss;  // mean minibatch loss per epoch
  std::vector<double> val_loss;
  int best_epoch = -1;  // epoch whose parameters were returned
  double best_val_loss = 0.0;
  bool early_stopped = false;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
};

/// Targets as regressed: effective weights (signed last component for
/// cooperative-flag environments).
std::vector<double> regression_target(const PreferenceVector& pref);

/// Adam on minibatch MSE with a held-out validation split. The cosine schedule
/// returns the final parameters; the plateau schedule early-stops and returns
/// the parameters with the lowest validation loss.
InferenceModel train_inference_model(const PiDataset& ds, const InferenceConfig& cfg, std::uint64_t seed,
                                     TrainingReport* report = nullptr);

/// Averages the demos' returns and maps the mean through the model.
PreferenceVector infer(const InferenceModel& model, std::span<const Trajectory> demos, double gamma);

}  // namespace dwpi::pi
