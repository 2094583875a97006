#include "dwpi/envs/scenarios.hpp"

#include <algorithm>
#include <stdexcept>

namespace dwpi::envs {

std::vector<Scenario> scenario_preferences(EnvName env) {
  switch (env) {
    case EnvName::Traffic:
      return {
          {"Always Safe", "always_safe", PreferenceVector({0.01, 0.45, 0.09, 0.44, 0.01})},
          {"Always Fast", "always_fast", PreferenceVector({0.12, 0.62, 0.12, 0.13, 0.01})},
          {"Fast and Safe", "fast_and_safe", PreferenceVector({0.05, 0.47, 0.00, 0.47, 0.01})},
          {"Slow and Safe", "slow_and_safe", PreferenceVector({0.01, 0.49, 0.00, 0.49, 0.01})},
      };
    case EnvName::ItemGathering:
      return {
          {"Competitive", "competitive", PreferenceVector({0.02, 0.08, 0.15, 0.30, 0.15, 0.30}, false)},
          {"Cooperative", "cooperative", PreferenceVector({0.02, 0.08, 0.15, 0.30, 0.15, 0.30}, true)},
          {"Fair", "fair", PreferenceVector({0.01, 0.05, 0.25, 0.19, 0.25, 0.25}, true)},
          {"Generous", "generous", PreferenceVector({0.02, 0.08, 0.30, 0.00, 0.30, 0.30}, true)},
      };
    case EnvName::Cdst:
      break;
  }
  throw std::invalid_argument("environment '" + std::string(to_string(env)) + "' has no scenarios");
}

const Scenario& find_scenario(const std::vector<Scenario>& scenarios, std::string_view name) {
  auto it = std::find_if(scenarios.begin(), scenarios.end(),
                         [&](const Scenario& s) { return s.label == name || s.slug == name; });
  if (it == scenarios.end()) throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
  return *it;
}

}  // namespace dwpi::envs
