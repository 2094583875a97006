#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwpi {

/// Raised for malformed inputs to the numerical core (empty trajectories,
/// dimension mismatches, degenerate weight vectors).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using RewardVector = std::vector<double>;

/// Non-negative weights on the probability simplex, one per objective.
///
/// Item Gathering additionally carries a cooperative flag. When the flag is
/// present and false, the weight of the final objective (collection by the
/// other agent) enters the scalarization with a negative sign.
class PreferenceVector {
 public:
  PreferenceVector() = default;

  /// Builds from weights that already satisfy the simplex invariants
  /// (tolerance 1e-9). Use normalize() for arbitrary input.
  explicit PreferenceVector(std::vector<double> weights,
                            std::optional<bool> cooperative = std::nullopt);

  const std::vector<double>& weights() const { return weights_; }
  std::optional<bool> cooperative() const { return cooperative_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

  /// Weights as used by the scalarization, with the cooperative-flag sign
  /// applied to the final component.
  std::vector<double> effective_weights() const;

  PreferenceVector with_cooperative(std::optional<bool> flag) const;

  friend bool operator==(const PreferenceVector&, const PreferenceVector&) = default;

 private:
  std::vector<double> weights_;
  std::optional<bool> cooperative_;
};

struct TrajectoryStep {
  std::uint64_t state = 0;
  int action = 0;
  RewardVector reward;

  friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  bool terminal = false;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Discounted per-objective sum of a trajectory's rewards.
struct Return {
  std::vector<double> components;
  double gamma = 1.0;

  std::size_t size() const { return components.size(); }
  double operator[](std::size_t i) const { return components[i]; }
};

Return discounted_return(const Trajectory& traj, double gamma);

/// Linear utility: dot product of the effective weights and the return.
double utility(const Return& ret, const PreferenceVector& pref);
double utility(std::span<const double> ret, const PreferenceVector& pref);

/// Clamps negative entries to zero and divides by the sum.
PreferenceVector normalize(std::span<const double> weights,
                           std::optional<bool> cooperative = std::nullopt);

/// Componentwise mean of equally sized vectors.
std::vector<double> mean_of(std::span<const std::vector<double>> rows);

/// Fixed-point text used in reports ("0.26"); never used inside computations.
std::string format_weights(const PreferenceVector& pref, int decimals = 2);

}  // namespace dwpi
