#include "dwpi/agents/dwtq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dwpi::agents {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

QTableSet::QTableSet(std::size_t state_count, std::size_t objective_count)
    : states_(state_count), objectives_(objective_count) {}

const QTableSet::Table& QTableSet::nearest(const PreferenceVector& pref) const {
  if (tables_.empty()) throw DomainError("no Q-tables trained");
  if (pref.size() != objectives_) throw DomainError("preference dimension mismatch");
  const Table* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& t : tables_) {
    if (t.pref.cooperative() != pref.cooperative()) continue;
    double d = 0.0;
    for (std::size_t i = 0; i < objectives_; ++i) d += std::abs(t.pref[i] - pref[i]);
    if (d < best_dist) {
      best_dist = d;
      best = &t;
    }
  }
  if (!best) throw DomainError("no Q-table matches the cooperative flag");
  return *best;
}

int QTableSet::greedy_action(const Table& table, std::uint64_t state) const {
  const std::size_t base = static_cast<std::size_t>(state) * envs::kActionCount;
  double best_q = table.q[base];
  for (int a = 1; a < envs::kActionCount; ++a) best_q = std::max(best_q, table.q[base + a]);
  const double tol = 1e-9 * std::max(1.0, std::abs(best_q));
  int best = -1;
  for (int a = 0; a < envs::kActionCount; ++a) {
    if (table.q[base + a] < best_q - tol) continue;
    if (best < 0 || table.steps_to_go[base + a] < table.steps_to_go[base + best]) best = a;
  }
  return best;
}

int QTableSet::greedy_action(const envs::Environment& env, const PreferenceVector& pref) const {
  return greedy_action(nearest(pref), env.state_id());
}

QTableSet train_dwtq(envs::Environment& env, std::span<const PreferenceVector> prefs, const AgentHyperparams& hp,
                     std::uint64_t seed) {
  hp.validate();
  const auto states = env.tabular_state_count();
  if (!states) throw DomainError("DWTQ needs a tabular state space");
  QTableSet set(*states, env.objective_count());
  const std::size_t cells = *states * envs::kActionCount;
  const auto upper = env.return_upper_bound();

  for (std::size_t k = 0; k < prefs.size(); ++k) {
    const auto& pref = prefs[k];
    if (pref.size() != env.objective_count()) throw DomainError("preference dimension mismatch");
    const auto w = pref.effective_weights();
    double q0 = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) q0 += std::max(0.0, w[j] * upper[j]);

    QTableSet::Table table{pref, std::vector<double>(cells, q0), std::vector<double>(cells, 0.0), {}};
    table.max_delta.reserve(hp.episodes);
    const std::uint64_t table_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    Rng rng(table_seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> any_action(0, envs::kActionCount - 1);

    for (int ep = 0; ep < hp.episodes; ++ep) {
      const double eps = epsilon_at(hp, ep);
      std::uint64_t s = env.reset(derive_seed(table_seed, static_cast<std::uint64_t>(ep)));
      double max_delta = 0.0;
      for (int t = 0; hp.max_steps == 0 || t < hp.max_steps; ++t) {
        const int a = coin(rng) < eps ? any_action(rng) : set.greedy_action(table, s);
        const auto res = env.step(a);
        double target = dot(res.reward, w);
        double target_steps = 1.0;
        if (!res.terminal) {
          const int next = set.greedy_action(table, res.next_state);
          const std::size_t ni = res.next_state * envs::kActionCount + next;
          target += hp.gamma * table.q[ni];
          target_steps += table.steps_to_go[ni];
        }
        const std::size_t i = s * envs::kActionCount + a;
        const double dq = hp.alpha * (target - table.q[i]);
        table.q[i] += dq;
        table.steps_to_go[i] += hp.alpha * (target_steps - table.steps_to_go[i]);
        max_delta = std::max(max_delta, std::abs(dq));
        s = res.next_state;
        if (res.done) break;
      }
      table.max_delta.push_back(max_delta);
    }
    set.tables().push_back(std::move(table));
  }
  return set;
}

}  // namespace dwpi::agents
