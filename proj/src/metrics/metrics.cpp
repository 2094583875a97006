#include "dwpi/metrics/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dwpi::metrics {

namespace {

std::vector<double> substitute_zeros(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out)
    if (x <= 0.0) x = kKlZeroSubstitute;
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& x : out) x /= sum;
  return out;
}

struct BatchStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

BatchStats stats(const std::vector<double>& xs) {
  BatchStats s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

std::vector<double> batch_utilities(const agents::Agent& agent, envs::Environment& env, const PreferenceVector& act,
                                    const PreferenceVector& score, int episodes, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(episodes));
  for (const auto& t : agents::rollout(agent, env, act, episodes, seed)) out.push_back(utility(discounted_return(t, 1.0), score));
  return out;
}

}  // namespace

double interval_accuracy(std::span<const double> treasure_weights, std::span<const envs::WeightInterval> intervals) {
  if (treasure_weights.size() != intervals.size())
    throw DomainError("interval_accuracy: " + std::to_string(treasure_weights.size()) + " inferences for " +
                      std::to_string(intervals.size()) + " intervals");
  if (intervals.empty()) throw DomainError("interval_accuracy: no inferences");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < intervals.size(); ++i) hits += intervals[i].contains(treasure_weights[i]);
  return static_cast<double>(hits) / static_cast<double>(intervals.size());
}

double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw DomainError("mse: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double mse(const PreferenceVector& a, const PreferenceVector& b) { return mse(a.weights(), b.weights()); }

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) throw DomainError("kl_divergence: dimension mismatch");
  const auto ps = substitute_zeros(p), qs = substitute_zeros(q);
  double kl = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) kl += ps[i] * std::log(ps[i] / qs[i]);
  // Rounding can leave tiny negatives when p and q agree.
  return std::max(kl, 0.0);
}

double kl_divergence(const PreferenceVector& p, const PreferenceVector& q) {
  return kl_divergence(p.weights(), q.weights());
}

double kl_for(const PreferenceVector& truth, const PreferenceVector& inferred, KlOrder order) {
  return order == KlOrder::TruthToInferred ? kl_divergence(truth, inferred) : kl_divergence(inferred, truth);
}

UtilityComparison compare_utility(const agents::Agent& agent, const envs::Environment& env,
                                  const PreferenceVector& w_hat, const PreferenceVector& w_true, int episodes,
                                  std::uint64_t seed_true, std::uint64_t seed_hat, UtilityConvention convention) {
  if (episodes <= 0) throw DomainError("utility comparison needs at least one episode");
  auto own = env.clone();
  const auto& score_hat = convention == UtilityConvention::TrueWeights ? w_true : w_hat;
  const auto t = stats(batch_utilities(agent, *own, w_true, w_true, episodes, seed_true));
  const auto h = stats(batch_utilities(agent, *own, w_hat, score_hat, episodes, seed_hat));
  return {t.mean, h.mean, t.stderr_, h.stderr_, std::abs(t.mean - h.mean)};
}

double utility_abs_error(const agents::Agent& agent, const envs::Environment& env, const PreferenceVector& w_hat,
                         const PreferenceVector& w_true, int episodes, std::uint64_t seed,
                         UtilityConvention convention) {
  return compare_utility(agent, env, w_hat, w_true, episodes, seed, seed, convention).abs_error;
}

}  // namespace dwpi::metrics
