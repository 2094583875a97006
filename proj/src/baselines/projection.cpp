#include "dwpi/baselines/projection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dwpi::baselines {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::vector<double> project_mu_bar(std::span<const double> mu_bar, std::span<const double> mu,
                                   std::span<const double> mu_e) {
  const std::size_t k = mu_bar.size();
  if (mu.size() != k || mu_e.size() != k) throw DomainError("projection: dimension mismatch");
  std::vector<double> d(k), target(k);
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = mu[i] - mu_bar[i];
    target[i] = mu_e[i] - mu_bar[i];
  }
  const double dd = dot(d, d);
  const double t = dd > 0.0 ? std::clamp(dot(d, target) / dd, 0.0, 1.0) : 0.0;
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = mu_bar[i] + t * d[i];
  return out;
}

PreferenceVector projection_direction(std::span<const double> mu_e, std::span<const double> mu_bar,
                                      std::optional<bool> cooperative_flag) {
  if (mu_e.size() != mu_bar.size()) throw DomainError("projection: dimension mismatch");
  std::vector<double> w(mu_e.size());
  double positive = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) positive += std::max(0.0, w[i] = mu_e[i] - mu_bar[i]);
  if (!(positive > 0.0)) w.assign(w.size(), 1.0);
  return normalize(w, cooperative_flag);
}

BaselineResult run_pm(envs::Environment& env, std::span<const Trajectory> expert_demos, const AgentTrainer& trainer,
                      const FeatureScaler& scaler, const SearchConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t k = env.objective_count();
  const auto mu_e = scaler.scale(expert_mu(expert_demos, cfg.gamma).mu);
  PreferenceVector omega;
  if (cfg.initial) {
    omega = cfg.initial->with_cooperative(cfg.cooperative_flag ? cfg.cooperative_flag : cfg.initial->cooperative());
  } else {
    Rng rng(derive_seed(seed, "initial"));
    omega = agents::dirichlet_sampler(k, false)(rng).with_cooperative(cfg.cooperative_flag);
  }

  BaselineResult result;
  std::vector<double> mu_bar;
  double best_distance = INFINITY;
  const auto start = std::chrono::steady_clock::now();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t it_seed = derive_seed(seed, static_cast<std::uint64_t>(it));
    const auto agent = trainer(omega, derive_seed(it_seed, "train"));
    const auto mu = scaler.scale(estimate_mu(*agent, env, omega, cfg.mu_episodes, cfg.gamma, derive_seed(it_seed, "mu")).mu);
    mu_bar = it == 1 ? mu : project_mu_bar(mu_bar, mu, mu_e);
    if (const double own = distance(mu, mu_e); own < best_distance) {
      best_distance = own;
      result.best = omega;
    }
    const double residual = distance(mu_e, mu_bar);
    const auto trained = omega;
    const bool done = residual <= cfg.epsilon;
    if (!done) omega = projection_direction(mu_e, mu_bar, cfg.cooperative_flag);
    const auto now = std::chrono::steady_clock::now();
    result.log.push_back({it, residual, trained, std::chrono::duration<double, std::milli>(now - t0).count()});
    if (done) {
      result.converged = true;
      break;
    }
    if (cfg.time_budget_ms && std::chrono::duration<double, std::milli>(now - start).count() >= *cfg.time_budget_ms)
      break;
  }
  result.final = omega;
  return result;
}

}  // namespace dwpi::baselines
