#include "dwpi/baselines/mwal.hpp"

#include <chrono>
#include <cmath>

namespace dwpi::baselines {

std::vector<double> mwal_multiply(std::span<const double> omega, std::span<const double> mu,
                                  std::span<const double> mu_e, int total_iterations) {
  const std::size_t k = omega.size();
  if (k < 2) throw DomainError("mwal_update needs at least two feature elements");
  if (mu.size() != k || mu_e.size() != k) throw DomainError("mwal_update: dimension mismatch");
  if (total_iterations < 1) throw DomainError("mwal_update: N must be at least 1");
  const double beta = 1.0 + std::sqrt(2.0 * std::log(static_cast<double>(k)) / total_iterations);
  std::vector<double> out(k);
  for (std::size_t n = 0; n < k; ++n) {
    const double gap = mu[n] - mu_e[n];
    out[n] = gap == 0.0 ? omega[n] : omega[n] * std::pow(beta, -gap);
  }
  return out;
}

PreferenceVector mwal_update(const PreferenceVector& omega, std::span<const double> mu, std::span<const double> mu_e,
                             int total_iterations) {
  const auto w = mwal_multiply(omega.weights(), mu, mu_e, total_iterations);
  bool same = true;
  for (std::size_t n = 0; n < w.size(); ++n) same = same && w[n] == omega[n];
  if (same) return omega;
  return normalize(w, omega.cooperative());
}

BaselineResult run_mwal(envs::Environment& env, std::span<const Trajectory> expert_demos, const AgentTrainer& trainer,
                        const FeatureScaler& scaler, const SearchConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t k = env.objective_count();
  const auto mu_e = scaler.scale(expert_mu(expert_demos, cfg.gamma).mu);
  PreferenceVector omega = cfg.initial
                               ? *cfg.initial
                               : PreferenceVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  if (cfg.cooperative_flag) omega = omega.with_cooperative(cfg.cooperative_flag);

  BaselineResult result;
  double best_residual = INFINITY;
  const auto start = std::chrono::steady_clock::now();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t it_seed = derive_seed(seed, static_cast<std::uint64_t>(it));
    const auto agent = trainer(omega, derive_seed(it_seed, "train"));
    const auto mu = scaler.scale(estimate_mu(*agent, env, omega, cfg.mu_episodes, cfg.gamma, derive_seed(it_seed, "mu")).mu);
    double residual = 0.0;
    for (std::size_t n = 0; n < k; ++n) residual = std::max(residual, std::abs(mu[n] - mu_e[n]));
    if (residual < best_residual) {
      best_residual = residual;
      result.best = omega;
    }
    const auto trained = omega;
    const bool done = residual < cfg.epsilon;
    if (!done) omega = mwal_update(omega, mu, mu_e, cfg.max_iterations);
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
