#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace dwpi::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dense {
  Matrix weights;  // out x in
  Vector bias;     // out
};

/// Per-layer gradients with the same shapes as the model's parameters.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Activations recorded by a batched forward pass for backprop.
struct Tape {
  std::vector<Matrix> inputs;  // input to each layer, samples as columns
  std::vector<Matrix> pre;     // pre-activation of each layer
  SparseMatrix sparse_input;   // set instead of inputs[0] by the sparse forward pass
  bool sparse = false;
};

/// Dense feed-forward network, ReLU on hidden layers and identity output.
class Mlp {
 public:
  Mlp() = default;
  /// All parameters zero.
  explicit Mlp(std::vector<std::size_t> layer_sizes);

  /// Uniform Glorot initialization, zero biases.
  static Mlp glorot(std::vector<std::size_t> layer_sizes, std::mt19937_64& rng);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t parameter_count() const;

  Dense& layer(std::size_t i) { return layers_[i]; }
  const Dense& layer(std::size_t i) const { return layers_[i]; }

  Vector forward(const Vector& input) const;
  std::vector<double> forward(const std::vector<double>& input) const;
  /// Samples are columns.
  Matrix forward_batch(const Matrix& inputs) const;
  Matrix forward_batch(const Matrix& inputs, Tape& tape) const;
  /// Same, for mostly-zero inputs; the first layer only touches non-zeros.
  Matrix forward_batch(const SparseMatrix& inputs) const;
  Matrix forward_batch(const SparseMatrix& inputs, Tape& tape) const;

  /// Backpropagates dLoss/dOutput (same shape as the batch output).
  Gradients backward(const Tape& tape, const Matrix& output_grad) const;

  Gradients zero_gradients() const;
  bool all_finite() const;

  /// Visits every parameter in a fixed order (layer, weights row-major, bias).
  template <typename F>
  void for_each_parameter(F&& f) {
    for (auto& l : layers_) {
      for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weights.cols(); ++c) f(l.weights(r, c));
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) f(l.bias(r));
    }
  }

 private:
  void check_input_rows(Eigen::Index rows) const;
  Matrix propagate(Matrix x, std::size_t first, Tape* tape) const;

  std::vector<std::size_t> sizes_;
  std::vector<Dense> layers_;
};

/// Mean squared error over all outputs and samples, with its gradient.
struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};
LossAndGradients mse_gradients(const Mlp& model, const Matrix& inputs, const Matrix& targets);
double mse_loss(const Mlp& model, const Matrix& inputs, const Matrix& targets);

/// Largest relative error between backprop and central differences
/// (step 1e-5) over all parameters, for a single (input, target) pair.
double grad_check(const Mlp& model, const Vector& input, const Vector& target);

/// Versioned text blob with 17 significant digits per parameter.
std::string serialize(const Mlp& model);
Mlp deserialize(std::string_view blob);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dwpi::nn
