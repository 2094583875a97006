#include "dwpi/baselines/feature_expectation.hpp"

#include <algorithm>

namespace dwpi::baselines {

FeatureExpectation estimate_mu(const agents::Agent& agent, envs::Environment& env, const PreferenceVector& pref,
                               int episodes, double gamma, std::uint64_t seed) {
  if (episodes < 1) throw DomainError("estimate_mu needs at least one episode");
  return expert_mu(agents::rollout(agent, env, pref, episodes, seed), gamma);
}

FeatureExpectation expert_mu(std::span<const Trajectory> demos, double gamma) {
  if (demos.empty()) throw DomainError("feature expectation needs at least one trajectory");
  std::vector<std::vector<double>> returns;
  returns.reserve(demos.size());
  for (const auto& d : demos) returns.push_back(discounted_return(d, gamma).components);
  return {mean_of(returns)};
}

std::vector<std::vector<double>> random_policy_returns(envs::Environment& env, int episodes, double gamma,
                                                       std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  Rng rng(derive_seed(seed, "random-policy"));
  std::uniform_int_distribution<int> action(0, envs::kActionCount - 1);
  for (int e = 0; e < episodes; ++e) {
    Trajectory traj;
    std::uint64_t state = env.reset(derive_seed(seed, static_cast<std::uint64_t>(e)));
    for (;;) {
      const int a = action(rng);
      auto res = env.step(a);
      traj.steps.push_back({state, a, std::move(res.reward)});
      state = res.next_state;
      if (res.done) break;
    }
    out.push_back(discounted_return(traj, gamma).components);
  }
  return out;
}

FeatureScaler::FeatureScaler(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.empty()) throw DomainError("feature scaler: bound dimensions differ");
  for (std::size_t j = 0; j < lo_.size(); ++j)
    if (!(hi_[j] >= lo_[j])) throw DomainError("feature scaler: upper bound below lower bound");
}

FeatureScaler FeatureScaler::from_returns(std::span<const std::vector<double>> returns,
                                          std::span<const std::vector<double>> extra) {
  if (returns.empty()) throw DomainError("feature scaler needs at least one return");
  auto lo = returns.front(), hi = returns.front();
  auto widen = [&](const std::vector<double>& r) {
    if (r.size() != lo.size()) throw DomainError("feature scaler: return dimensions differ");
    for (std::size_t j = 0; j < r.size(); ++j) {
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
  };
  for (const auto& r : returns) widen(r);
  for (const auto& r : extra) widen(r);
  return {std::move(lo), std::move(hi)};
}

FeatureScaler FeatureScaler::from_random_policy(envs::Environment& env, double gamma, std::uint64_t seed,
                                                std::span<const std::vector<double>> extra, int episodes) {
  const auto returns = random_policy_returns(env, episodes, gamma, seed);
  return from_returns(returns, extra);
}

std::vector<double> FeatureScaler::scale(std::span<const double> mu) const {
  if (mu.size() != lo_.size()) throw DomainError("feature scaler: dimension mismatch");
  std::vector<double> out(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double range = hi_[j] - lo_[j];
    // A constant feature carries no information.
    out[j] = range > 0.0 ? (mu[j] - lo_[j]) / range : 0.0;
  }
  return out;
}

}  // namespace dwpi::baselines
