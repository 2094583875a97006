#pragma once

#include "dwpi/nn/mlp.hpp"

namespace dwpi::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment accumulators shaped like a model's parameters.
class Adam {
 public:
  Adam(const Mlp& model, AdamConfig config);

  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  long step_count() const { return steps_; }

  void step(Mlp& model, const Gradients& grads);

 private:
  AdamConfig config_;
  Gradients m_;
  Gradients v_;
  long steps_ = 0;
};

/// One Adam step on the batch MSE. Returns the loss before the update.
/// Throws DivergenceError on a non-finite loss.
double train_step(Mlp& model, const Matrix& inputs, const Matrix& targets, Adam& opt);

}  // namespace dwpi::nn
