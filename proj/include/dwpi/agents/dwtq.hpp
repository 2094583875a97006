#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dwpi/agents/agent.hpp"

namespace dwpi::agents {

/// One Q-table per training preference. Each table also tracks the expected
/// number of remaining steps of its greedy policy, used to break exact value
/// ties towards shorter paths.
class QTableSet final : public Agent {
 public:
  struct Table {
    PreferenceVector pref;
    std::vector<double> q;            // state-major, kActionCount per state
    std::vector<double> steps_to_go;  // same layout as q
    std::vector<double> max_delta;    // largest |dQ| in each training episode
  };

  QTableSet() = default;
  QTableSet(std::size_t state_count, std::size_t objective_count);

  std::size_t state_count() const { return states_; }
  std::size_t objective_count() const { return objectives_; }
  const std::vector<Table>& tables() const { return tables_; }
  std::vector<Table>& tables() { return tables_; }

  /// Table trained for the stored preference closest (L1) to pref.
  const Table& nearest(const PreferenceVector& pref) const;

  int greedy_action(const Table& table, std::uint64_t state) const;
  int greedy_action(const envs::Environment& env, const PreferenceVector& pref) const override;
  std::string kind() const override { return "dwtq"; }

 private:
  std::size_t states_ = 0;
  std::size_t objectives_ = 0;
  std::vector<Table> tables_;
};

/// Tabular Q-learning run separately for every preference in prefs, with
/// epsilon-greedy exploration and optimistic initialization. Requires an
/// environment with a tabular state space.
QTableSet train_dwtq(envs::Environment& env, std::span<const PreferenceVector> prefs, const AgentHyperparams& hp,
                     std::uint64_t seed);

}  // namespace dwpi::agents
