#include "dwpi/baselines/trainers.hpp"

#include <cstdio>

#include "dwpi/agents/dwdqn.hpp"
#include "dwpi/agents/dwtq.hpp"

namespace dwpi::baselines {

AgentTrainer dwtq_trainer(envs::EnvSpec spec, agents::AgentHyperparams hp) {
  hp.validate();
  return [spec = std::move(spec), hp](const PreferenceVector& pref, std::uint64_t seed) {
    auto env = envs::make_environment(spec);
    const std::vector<PreferenceVector> one{pref};
    return std::shared_ptr<const agents::Agent>(
        std::make_shared<agents::QTableSet>(agents::train_dwtq(*env, one, hp, seed)));
  };
}

AgentTrainer dwdqn_trainer(envs::EnvSpec spec, agents::AgentHyperparams hp) {
  hp.validate();
  return [spec = std::move(spec), hp](const PreferenceVector& pref, std::uint64_t seed) {
    auto env = envs::make_environment(spec);
    return std::shared_ptr<const agents::Agent>(
        std::make_shared<agents::DwdqnAgent>(agents::train_dwdqn(*env, hp, agents::fixed_sampler(pref), seed)));
  };
}

AgentTrainer shared_agent_trainer(std::shared_ptr<const agents::Agent> agent) {
  if (!agent) throw std::invalid_argument("shared trainer needs an agent");
  return [agent = std::move(agent)](const PreferenceVector&, std::uint64_t) { return agent; };
}

void SearchConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("baseline needs at least one iteration");
  if (!(epsilon > 0.0)) throw std::invalid_argument("convergence epsilon must be positive");
  if (mu_episodes < 1) throw std::invalid_argument("feature expectation needs at least one episode");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (time_budget_ms && !(*time_budget_ms > 0.0)) throw std::invalid_argument("time budget must be positive");
}

std::string format_iteration_log(std::span<const IterationRecord> log) {
  std::string out = "iteration,residual";
  const std::size_t k = log.empty() ? 0 : log.front().omega.size();
  for (std::size_t j = 0; j < k; ++j) out += ",w" + std::to_string(j);
  out += ",ms\n";
  char buf[40];
  for (const auto& r : log) {
    out += std::to_string(r.iteration);
    std::snprintf(buf, sizeof buf, ",%.10g", r.residual);
    out += buf;
    for (double w : r.omega.weights()) {
      std::snprintf(buf, sizeof buf, ",%.10g", w);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.3f\n", r.ms);
    out += buf;
  }
  return out;
}

}  // namespace dwpi::baselines
