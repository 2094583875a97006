#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dwpi/core.hpp"
#include "dwpi/envs/environment.hpp"

namespace dwpi::envs {

/// Closed interval on the treasure weight.
struct WeightInterval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double w) const { return w >= lo && w <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
};

struct ParetoPoint {
  Return ret;           // (-steps, treasure value)
  int treasure = 0;     // 1-based, ordered by distance from the start
  int steps = 0;
  double value = 0.0;
  /// Treasure weights for which this point maximizes utility; empty for
  /// points that are not supported by any linear weighting.
  std::optional<WeightInterval> interval;
};

/// Shortest-path distance from the start to every treasure, treating
/// treasures as terminal (they cannot be walked through).
std::vector<int> treasure_distances(const EnvSpec& spec);

/// Exhaustive Pareto front of a Deep Sea Treasure layout, one point per
/// non-dominated treasure, sorted by increasing distance.
std::vector<ParetoPoint> cdst_pareto_front(const EnvSpec& spec);

/// Index into the front whose interval contains w (the lower treasure wins on
/// a shared boundary), or -1.
int interval_index(const std::vector<ParetoPoint>& front, double treasure_weight);

}  // namespace dwpi::envs
