#include "dwpi/agents/agent.hpp"

#include <algorithm>
#include <stdexcept>

namespace dwpi::agents {

void AgentHyperparams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  auto unit = [](double e) { return e >= 0.0 && e <= 1.0; };
  if (!unit(epsilon_start) || !unit(epsilon_end)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (epsilon_end > epsilon_start) throw std::invalid_argument("epsilon must not increase");
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0))
    throw std::invalid_argument("epsilon_decay_fraction must lie in (0, 1]");
  if (episodes < 0) throw std::invalid_argument("episodes must be non-negative");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be non-negative");
  if (batch_size == 0 || replay_capacity < batch_size) throw std::invalid_argument("replay capacity below batch size");
  if (target_sync <= 0) throw std::invalid_argument("target_sync must be positive");
  if (threshold < 0 || updates_per_episode < 0) throw std::invalid_argument("threshold/updates must be non-negative");
  if (!(relabel_fraction >= 0.0 && relabel_fraction <= 1.0))
    throw std::invalid_argument("relabel_fraction must lie in [0, 1]");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be non-negative");
}

double epsilon_at(const AgentHyperparams& hp, int episode) {
  const double horizon = std::max(1.0, hp.epsilon_decay_fraction * hp.episodes);
  const double progress = std::min(1.0, static_cast<double>(episode) / horizon);
  return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * progress;
}

PreferenceSampler dirichlet_sampler(std::size_t objectives, bool cooperative_flag) {
  if (objectives == 0) throw std::invalid_argument("dirichlet sampler needs objectives");
  return [objectives, cooperative_flag](Rng& rng) {
    std::exponential_distribution<double> draw(1.0);
    std::vector<double> w(objectives);
    double sum = 0.0;
    for (double& x : w) {
      x = draw(rng);
      sum += x;
    }
    for (double& x : w) x /= sum;
    std::optional<bool> flag;
    if (cooperative_flag) flag = std::bernoulli_distribution(0.5)(rng);
    return PreferenceVector(std::move(w), flag);
  };
}

PreferenceSampler list_sampler(std::vector<PreferenceVector> prefs) {
  if (prefs.empty()) throw std::invalid_argument("list sampler needs preferences");
  return [prefs = std::move(prefs)](Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, prefs.size() - 1);
    return prefs[pick(rng)];
  };
}

PreferenceSampler fixed_sampler(PreferenceVector pref) {
  return [pref = std::move(pref)](Rng&) { return pref; };
}

PreferenceSampler default_sampler(envs::EnvName env) {
  const auto spec = envs::default_spec(env);
  return dirichlet_sampler(spec.objective_count, env == envs::EnvName::ItemGathering);
}

std::vector<PreferenceVector> preference_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
  const int n = static_cast<int>(std::lround(1.0 / step));
  std::vector<PreferenceVector> grid;
  for (int i = 0; i <= n; ++i) {
    const double w = static_cast<double>(i) / n;
    grid.emplace_back(std::vector<double>{1.0 - w, w});
  }
  return grid;
}

std::vector<Trajectory> rollout(const Agent& agent, envs::Environment& env, const PreferenceVector& pref, int episodes,
                                std::uint64_t seed) {
  if (pref.size() != env.objective_count()) throw DomainError("rollout: preference dimension mismatch");
  std::vector<Trajectory> out;
  for (int e = 0; e < episodes; ++e) {
    Trajectory traj;
    std::uint64_t state = env.reset(derive_seed(seed, static_cast<std::uint64_t>(e)));
    for (;;) {
      const int a = agent.greedy_action(env, pref);
      auto res = env.step(a);
      traj.steps.push_back({state, a, std::move(res.reward)});
      state = res.next_state;
      if (res.done) {
        traj.terminal = res.terminal;
        break;
      }
    }
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace dwpi::agents
