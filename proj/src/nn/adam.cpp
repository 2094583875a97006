#include "dwpi/nn/adam.hpp"

#include <cmath>

namespace dwpi::nn {

Adam::Adam(const Mlp& model, AdamConfig config)
    : config_(config), m_(model.zero_gradients()), v_(model.zero_gradients()) {}

void Adam::step(Mlp& model, const Gradients& grads) {
  if (grads.weights.size() != m_.weights.size()) throw std::invalid_argument("gradient shape does not match optimizer");
  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    update(model.layer(i).weights, grads.weights[i], m_.weights[i], v_.weights[i]);
    update(model.layer(i).bias, grads.biases[i], m_.biases[i], v_.biases[i]);
  }
}

double train_step(Mlp& model, const Matrix& inputs, const Matrix& targets, Adam& opt) {
  auto [loss, grads] = mse_gradients(model, inputs, targets);
  if (!std::isfinite(loss)) throw DivergenceError("divergence: non-finite training loss");
  opt.step(model, grads);
  return loss;
}

}  // namespace dwpi::nn
