#include "dwpi/nn/mlp.hpp"

#include <cmath>

namespace dwpi::nn {

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("an mlp needs at least input and output sizes");
  for (std::size_t s : sizes_)
    if (s == 0) throw std::invalid_argument("layer sizes must be positive");
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    const auto out = static_cast<Eigen::Index>(sizes_[i + 1]);
    const auto in = static_cast<Eigen::Index>(sizes_[i]);
    layers_.push_back({Matrix::Zero(out, in), Vector::Zero(out)});
  }
}

Mlp Mlp::glorot(std::vector<std::size_t> layer_sizes, std::mt19937_64& rng) {
  Mlp model(std::move(layer_sizes));
  for (auto& l : model.layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weights.rows() + l.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = dist(rng);
  }
  return model;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

void Mlp::check_input_rows(Eigen::Index rows) const {
  if (layers_.empty()) throw std::invalid_argument("empty model");
  if (rows != static_cast<Eigen::Index>(input_size()))
    throw std::invalid_argument("input size " + std::to_string(rows) + " does not match model input " +
                                std::to_string(input_size()));
}

Vector Mlp::forward(const Vector& input) const {
  check_input_rows(input.size());
  Vector x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Vector z = layers_[i].weights * x + layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    x = std::move(z);
  }
  return x;
}

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
  const Vector out = forward(Eigen::Map<const Vector>(input.data(), static_cast<Eigen::Index>(input.size())));
  return {out.data(), out.data() + out.size()};
}

Matrix Mlp::propagate(Matrix x, std::size_t first, Tape* tape) const {
  for (std::size_t i = first; i < layers_.size(); ++i) {
    Matrix z = layers_[i].weights * x;
    z.colwise() += layers_[i].bias;
    if (tape) {
      tape->inputs.push_back(std::move(x));
      tape->pre.push_back(z);
    }
    x = (i + 1 < layers_.size()) ? Matrix(z.cwiseMax(0.0)) : std::move(z);
  }
  return x;
}

Matrix Mlp::forward_batch(const Matrix& inputs) const {
  check_input_rows(inputs.rows());
  return propagate(inputs, 0, nullptr);
}

Matrix Mlp::forward_batch(const Matrix& inputs, Tape& tape) const {
  check_input_rows(inputs.rows());
  tape = Tape{};
  return propagate(inputs, 0, &tape);
}

Matrix Mlp::forward_batch(const SparseMatrix& inputs) const {
  check_input_rows(inputs.rows());
  Matrix z = layers_[0].weights * inputs;
  z.colwise() += layers_[0].bias;
  if (layers_.size() == 1) return z;
  return propagate(z.cwiseMax(0.0), 1, nullptr);
}

Matrix Mlp::forward_batch(const SparseMatrix& inputs, Tape& tape) const {
  check_input_rows(inputs.rows());
  tape = Tape{};
  tape.sparse = true;
  tape.sparse_input = inputs;
  Matrix z = layers_[0].weights * inputs;
  z.colwise() += layers_[0].bias;
  tape.inputs.emplace_back();
  tape.pre.push_back(z);
  if (layers_.size() == 1) return z;
  return propagate(z.cwiseMax(0.0), 1, &tape);
}

Gradients Mlp::backward(const Tape& tape, const Matrix& output_grad) const {
  Gradients g = zero_gradients();
  Matrix delta = output_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (i + 1 < layers_.size()) delta = delta.cwiseProduct((tape.pre[i].array() > 0.0).cast<double>().matrix());
    if (i == 0 && tape.sparse) {
      g.weights[i] = (tape.sparse_input * delta.transpose()).transpose();
    } else {
      g.weights[i] = delta * tape.inputs[i].transpose();
    }
    g.biases[i] = delta.rowwise().sum();
    if (i > 0) delta = layers_[i].weights.transpose() * delta;
  }
  return g;
}

Gradients Mlp::zero_gradients() const {
  Gradients g;
  for (const auto& l : layers_) {
    g.weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
    g.biases.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_)
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

LossAndGradients mse_gradients(const Mlp& model, const Matrix& inputs, const Matrix& targets) {
  if (inputs.cols() == 0) throw std::invalid_argument("empty batch");
  if (targets.cols() != inputs.cols() || targets.rows() != static_cast<Eigen::Index>(model.output_size()))
    throw std::invalid_argument("target shape does not match model output");
  Tape tape;
  const Matrix out = model.forward_batch(inputs, tape);
  const Matrix diff = out - targets;
  const double n = static_cast<double>(diff.size());
  LossAndGradients r;
  r.loss = diff.squaredNorm() / n;
  r.grads = model.backward(tape, diff * (2.0 / n));
  return r;
}

double mse_loss(const Mlp& model, const Matrix& inputs, const Matrix& targets) {
  const Matrix diff = model.forward_batch(inputs) - targets;
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

double grad_check(const Mlp& model, const Vector& input, const Vector& target) {
  constexpr double h = 1e-5;
  const Matrix x = input;
  const Matrix y = target;
  const Gradients analytic = mse_gradients(model, x, y).grads;

  std::vector<double> flat;
  for (std::size_t i = 0; i < analytic.weights.size(); ++i) {
    const auto& w = analytic.weights[i];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    for (Eigen::Index r = 0; r < analytic.biases[i].size(); ++r) flat.push_back(analytic.biases[i](r));
  }

  Mlp probe = model;
  double worst = 0.0;
  std::size_t k = 0;
  probe.for_each_parameter([&](double& p) {
    const double saved = p;
    p = saved + h;
    const double up = mse_loss(probe, x, y);
    p = saved - h;
    const double down = mse_loss(probe, x, y);
    p = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = flat[k++];
    const double scale = std::abs(a) + std::abs(numeric);
    // Both near zero: agreement is exact for our purposes.
    if (scale < 1e-7) return;
    worst = std::max(worst, std::abs(a - numeric) / scale);
  });
  return worst;
}

}  // namespace dwpi::nn
