#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dwpi/core.hpp"
#include "dwpi/envs/environment.hpp"

namespace dwpi::envs {

struct Scenario {
  std::string label;  // e.g. "Always Safe"
  std::string slug;   // e.g. "always_safe"
  PreferenceVector preference;
};

/// The four behaviour scenarios of Traffic and Item Gathering, in their
/// canonical order. Throws for environments without scenarios.
std::vector<Scenario> scenario_preferences(EnvName env);

/// Lookup by label or slug.
const Scenario& find_scenario(const std::vector<Scenario>& scenarios, std::string_view name);

}  // namespace dwpi::envs
