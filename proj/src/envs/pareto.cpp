#include "dwpi/envs/pareto.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace dwpi::envs {

std::vector<int> treasure_distances(const EnvSpec& spec) {
  if (spec.name != EnvName::Cdst) throw std::invalid_argument("treasure distances need a cdst layout");
  const auto& grid = spec.grid;
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(grid.rows * grid.cols), kUnreached);
  std::vector<bool> is_treasure(dist.size(), false);
  for (const auto& t : grid.treasures) is_treasure[static_cast<std::size_t>(grid.index(t.pos))] = true;

  std::deque<Position> frontier{*grid.start};
  dist[static_cast<std::size_t>(grid.index(*grid.start))] = 0;
  while (!frontier.empty()) {
    const Position p = frontier.front();
    frontier.pop_front();
    if (is_treasure[static_cast<std::size_t>(grid.index(p))]) continue;
    for (int a = 0; a < kActionCount; ++a) {
      const Position q = apply_action(p, a);
      if (!grid.walkable(q)) continue;
      auto& d = dist[static_cast<std::size_t>(grid.index(q))];
      if (d != kUnreached) continue;
      d = dist[static_cast<std::size_t>(grid.index(p))] + 1;
      frontier.push_back(q);
    }
  }
  std::vector<int> out;
  for (const auto& t : grid.treasures) out.push_back(dist[static_cast<std::size_t>(grid.index(t.pos))]);
  return out;
}

std::vector<ParetoPoint> cdst_pareto_front(const EnvSpec& spec) {
  const auto dist = treasure_distances(spec);
  const auto& treasures = spec.grid.treasures;

  std::vector<ParetoPoint> candidates;
  for (std::size_t i = 0; i < treasures.size(); ++i) {
    if (dist[i] == std::numeric_limits<int>::max()) continue;
    ParetoPoint p;
    p.steps = dist[i];
    p.value = treasures[i].value;
    p.ret.components = {-static_cast<double>(p.steps), p.value};
    candidates.push_back(p);
  }

  std::vector<ParetoPoint> front;
  for (const auto& p : candidates) {
    const bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](const ParetoPoint& q) {
      return q.steps <= p.steps && q.value >= p.value && (q.steps < p.steps || q.value > p.value);
    });
    if (!dominated) front.push_back(p);
  }
  std::sort(front.begin(), front.end(), [](const auto& a, const auto& b) { return a.steps < b.steps; });

  // u_k(w) = -(1 - w) s_k + w v_k. Point k beats j for w where
  // (s_j - s_k) + w [(v_k - v_j) - (s_j - s_k)] >= 0, so each pairwise
  // constraint bounds w from one side.
  for (std::size_t k = 0; k < front.size(); ++k) {
    double lo = 0.0, hi = 1.0;
    for (std::size_t j = 0; j < front.size(); ++j) {
      if (j == k) continue;
      const double a = front[j].steps - front[k].steps;
      const double b = (front[k].value - front[j].value) - a;
      if (b > 0) {
        lo = std::max(lo, -a / b);
      } else if (b < 0) {
        hi = std::min(hi, -a / b);
      } else if (a < 0) {
        hi = -1.0;  // never better
      }
    }
    front[k].treasure = static_cast<int>(k) + 1;
    if (lo <= hi) front[k].interval = WeightInterval{lo, hi};
  }
  return front;
}

int interval_index(const std::vector<ParetoPoint>& front, double treasure_weight) {
  for (std::size_t k = 0; k < front.size(); ++k)
    if (front[k].interval && front[k].interval->contains(treasure_weight)) return static_cast<int>(k);
  return -1;
}

}  // namespace dwpi::envs
