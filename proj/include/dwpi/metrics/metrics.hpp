#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <type_traits>
#include <utility>

#include "dwpi/agents/agent.hpp"
#include "dwpi/envs/pareto.hpp"

namespace dwpi::metrics {

/// Stand-in for zero probabilities before the KL divergence is taken.
inline constexpr double kKlZeroSubstitute = 1e-5;

enum class KlOrder { TruthToInferred, InferredToTruth };
enum class UtilityConvention {
  TrueWeights,  // both batches scored with the ground-truth preference
  OwnWeights,   // each batch scored with the preference it was rolled out with
};

/// Fraction of treasure weights inside the interval at the same index
/// (closed bounds). Throws on a count mismatch or an empty input.
double interval_accuracy(std::span<const double> treasure_weights, std::span<const envs::WeightInterval> intervals);

/// Mean squared componentwise difference.
double mse(std::span<const double> a, std::span<const double> b);
double mse(const PreferenceVector& a, const PreferenceVector& b);

/// Zero entries are replaced by kKlZeroSubstitute, both vectors renormalized,
/// then sum p ln(p / q).
double kl_divergence(std::span<const double> p, std::span<const double> q);
double kl_divergence(const PreferenceVector& p, const PreferenceVector& q);
/// KL between ground truth and inference in the configured direction.
double kl_for(const PreferenceVector& truth, const PreferenceVector& inferred, KlOrder order = KlOrder::TruthToInferred);

struct UtilityComparison {
  double mean_true = 0.0;  // batch rolled out with w_true
  double mean_hat = 0.0;   // batch rolled out with w_hat
  double stderr_true = 0.0;
  double stderr_hat = 0.0;
  double abs_error = 0.0;
};

/// Rolls out `episodes` greedy episodes with w_true and with w_hat and compares
/// mean utilities. Batch episodes reset with seed_true / seed_hat streams.
UtilityComparison compare_utility(const agents::Agent& agent, const envs::Environment& env,
                                  const PreferenceVector& w_hat, const PreferenceVector& w_true, int episodes,
                                  std::uint64_t seed_true, std::uint64_t seed_hat,
                                  UtilityConvention convention = UtilityConvention::TrueWeights);

/// |u_true - u_hat| with both batches on the same episode seeds.
double utility_abs_error(const agents::Agent& agent, const envs::Environment& env, const PreferenceVector& w_hat,
                         const PreferenceVector& w_true, int episodes = 100, std::uint64_t seed = 0,
                         UtilityConvention convention = UtilityConvention::TrueWeights);

template <class T>
struct Timed {
  T value;
  double ms;
};

template <>
struct Timed<void> {
  double ms;
};

/// Runs op and measures it on the steady clock.
template <class F>
auto timed(F&& op) {
  using R = std::invoke_result_t<F>;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count(); };
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(op)();
    return Timed<void>{elapsed()};
  } else {
    R value = std::forward<F>(op)();
    const double ms = elapsed();
    return Timed<R>{std::move(value), ms};
  }
}

}  // namespace dwpi::metrics
