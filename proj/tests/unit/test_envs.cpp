#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "doctest.h"
#include "dwpi/envs/cdst.hpp"
#include "dwpi/envs/item_gathering.hpp"
#include "dwpi/envs/pareto.hpp"
#include "dwpi/envs/scenarios.hpp"
#include "dwpi/envs/traffic.hpp"

using namespace dwpi;
using namespace dwpi::envs;

namespace {

// Test-side oracle: BFS over the parsed grid, then brute-force utility
// maximization per weight. Ties go to the shorter path.
struct OracleTreasure {
  int steps;
  double value;
};

std::vector<OracleTreasure> oracle_treasures(const GridLayout& g) {
  std::map<Position, double> treasure;
  for (const auto& t : g.treasures) treasure[t.pos] = t.value;
  std::map<Position, int> dist{{*g.start, 0}};
  std::deque<Position> q{*g.start};
  std::vector<OracleTreasure> out;
  while (!q.empty()) {
    auto p = q.front();
    q.pop_front();
    if (treasure.count(p)) {
      out.push_back({dist[p], treasure[p]});
      continue;
    }
    const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      Position n{p.row + dr[k], p.col + dc[k]};
      if (n.row < 0 || n.col < 0 || n.row >= g.rows || n.col >= g.cols) continue;
      if (g.terrain[n.row * g.cols + n.col] == Terrain::Wall || dist.count(n)) continue;
      dist[n] = dist[p] + 1;
      q.push_back(n);
    }
  }
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.steps < b.steps; });
  return out;
}

int oracle_best(const std::vector<OracleTreasure>& ts, double w) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(ts.size()); ++i) {
    const double ui = -(1 - w) * ts[i].steps + w * ts[i].value;
    const double ub = -(1 - w) * ts[best].steps + w * ts[best].value;
    if (ui > ub + 1e-12) best = i;
  }
  return best;
}

std::vector<StepResult> replay(Environment& env, std::uint64_t seed, const std::vector<int>& actions) {
  env.reset(seed);
  std::vector<StepResult> out;
  for (int a : actions) {
    out.push_back(env.step(a));
    if (out.back().done) break;
  }
  return out;
}

bool same(const std::vector<StepResult>& a, const std::vector<StepResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].next_state != b[i].next_state || a[i].reward != b[i].reward || a[i].done != b[i].done) return false;
  return true;
}

}  // namespace

TEST_CASE("objective counts and order") {
  CHECK(default_spec(EnvName::Cdst).objective_count == 2);
  CHECK(default_spec(EnvName::Traffic).objective_count == 5);
  CHECK(default_spec(EnvName::ItemGathering).objective_count == 6);
  CHECK(default_spec(EnvName::Traffic).objective_names ==
        std::vector<std::string>{"steps", "item_collection", "traffic_rules", "collisions", "wall_hitting"});
  CHECK(default_spec(EnvName::ItemGathering).objective_names ==
        std::vector<std::string>{"steps", "wall_hitting", "green", "red", "yellow", "other_agent"});
  CHECK(default_spec(EnvName::Cdst).max_steps == 50);
  CHECK(default_spec(EnvName::Traffic).max_steps == 100);
  CHECK(default_spec(EnvName::ItemGathering).max_steps == 100);
}

TEST_CASE("cdst starts top left and charges one time unit per step") {
  CdstEnv env(default_spec(EnvName::Cdst));
  env.reset(0);
  CHECK(env.position() == Position{0, 0});
  auto r = env.step(kRight);
  CHECK(r.reward == RewardVector{-1, 0});
  CHECK_FALSE(r.done);
  r = env.step(kUp);  // wall hit keeps position
  CHECK(env.position() == Position{0, 1});
  CHECK(r.reward[0] == -1);
}

TEST_CASE("cdst terminates exactly on treasure cells or at max steps") {
  CdstEnv env(default_spec(EnvName::Cdst));
  env.reset(0);
  auto r = env.step(kDown);
  CHECK(r.terminal);
  CHECK(r.done);
  CHECK(r.reward == RewardVector{-1, 1});

  Rng rng(4);
  std::uniform_int_distribution<int> act(0, 3);
  for (int ep = 0; ep < 200; ++ep) {
    env.reset(0);
    for (;;) {
      auto s = env.step(act(rng));
      const bool on_treasure = env.treasure_at(env.position()) >= 0;
      CHECK(s.terminal == on_treasure);
      CHECK(s.done == (on_treasure || env.steps_taken() == 50));
      if (s.done) break;
    }
  }
}

TEST_CASE("cdst pareto front has ten mutually non-dominated points") {
  const auto spec = default_spec(EnvName::Cdst);
  const auto front = cdst_pareto_front(spec);
  REQUIRE(front.size() == 10);
  for (const auto& p : front)
    for (const auto& q : front) {
      if (&p == &q) continue;
      const bool dominates = q.ret[0] >= p.ret[0] && q.ret[1] >= p.ret[1] && (q.ret[0] > p.ret[0] || q.ret[1] > p.ret[1]);
      CHECK_FALSE(dominates);
    }
  CHECK(front.front().interval->lo == 0.0);
  CHECK(front.back().interval->hi == 1.0);
  for (std::size_t k = 0; k + 1 < front.size(); ++k)
    CHECK(front[k].interval->hi == doctest::Approx(front[k + 1].interval->lo).epsilon(1e-12));
}

TEST_CASE("cdst front matches the brute-force oracle") {
  const auto spec = default_spec(EnvName::Cdst);
  const auto front = cdst_pareto_front(spec);
  const auto oracle = oracle_treasures(spec.grid);
  REQUIRE(oracle.size() == front.size());
  for (std::size_t k = 0; k < front.size(); ++k) {
    CHECK(front[k].steps == oracle[k].steps);
    CHECK(front[k].value == oracle[k].value);
  }
  // Each interval's lower bound is the crossing with the previous point.
  for (std::size_t k = 1; k < front.size(); ++k) {
    const double ds = oracle[k].steps - oracle[k - 1].steps;
    const double dv = oracle[k].value - oracle[k - 1].value;
    CHECK(front[k].interval->lo == doctest::Approx(ds / (dv + ds)).epsilon(1e-12));
  }
  // Away from boundaries the interval lookup agrees with brute force.
  for (int i = 0; i <= 1000; ++i) {
    const double w = i / 1000.0;
    const int idx = interval_index(front, w);
    REQUIRE(idx >= 0);
    const auto iv = *front[static_cast<std::size_t>(idx)].interval;
    if (std::abs(w - iv.lo) < 1e-9 || std::abs(w - iv.hi) < 1e-9) continue;
    CHECK(idx == oracle_best(oracle, w));
  }
}

TEST_CASE("cdst intervals reproduce the published two-decimal table") {
  const auto front = cdst_pareto_front(default_spec(EnvName::Cdst));
  // Grid points owned by each treasure, as printed for treasures 1 to 10.
  const std::vector<std::pair<int, int>> table{{0, 5},   {6, 7},   {8, 9},   {10, 11},  {12, 14},
                                               {15, 16}, {17, 20}, {21, 33}, {34, 50}, {51, 100}};
  for (int g = 0; g <= 100; ++g) {
    const int idx = interval_index(front, g / 100.0);
    int expected = -1;
    for (int k = 0; k < 10; ++k)
      if (g >= table[k].first && g <= table[k].second) expected = k;
    CHECK_MESSAGE(idx == expected, "grid point " << g);
  }
}

TEST_CASE("traffic reset, roads and rules") {
  TrafficEnv env(default_spec(EnvName::Traffic));
  env.reset(1);
  CHECK(env.agent() == Position{7, 0});
  // The road column is walled off from the bottom corridor.
  env.step(kRight);
  env.step(kRight);
  auto r = env.step(kUp);
  CHECK(env.agent() == Position{7, 2});  // (6,2) is a wall
  CHECK(r.reward[4] == -1.0);
  CHECK(r.reward[2] == 0.0);
  const auto& grid = env.spec().grid;
  env.reset(1);
  // Up the left column, then right onto the road.
  for (int i = 0; i < 4; ++i) env.step(kUp);
  env.step(kRight);
  r = env.step(kRight);
  CHECK(grid.at(env.agent()) == Terrain::Road);
  CHECK(r.reward[2] == -1.0);
}

TEST_CASE("traffic cars stay on roads and reverse at the road end") {
  TrafficEnv env(default_spec(EnvName::Traffic));
  const auto& grid = env.spec().grid;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    env.reset(seed);
    auto prev = env.cars();
    for (int t = 0; t < 60; ++t) {
      auto s = env.step(kLeft);
      for (std::size_t i = 0; i < env.cars().size(); ++i) {
        const auto& c = env.cars()[i];
        CHECK(grid.at(c.pos) == Terrain::Road);
        const Position ahead{prev[i].pos.row + prev[i].direction, prev[i].pos.col};
        const bool blocked = !grid.inside(ahead) || grid.at(ahead) != Terrain::Road;
        CHECK(c.direction == (blocked ? -prev[i].direction : prev[i].direction));
        CHECK(std::abs(c.pos.row - prev[i].pos.row) == 1);
      }
      prev = env.cars();
      if (s.done) break;
    }
  }
}

TEST_CASE("traffic collision and termination") {
  TrafficEnv::Car car{{0, 2}, -1};
  TrafficEnv env(default_spec(EnvName::Traffic));
  TrafficEnv::advance_car(env.spec().grid, car);
  CHECK(car.pos == Position{1, 2});
  CHECK(car.direction == 1);

  env.reset(3);
  for (int i = 0; i < 7; ++i) env.step(kUp);
  CHECK(env.collected()[0]);
  bool done = false;
  for (int i = 0; i < 7 && !done; ++i) done = env.step(kRight).done;
  CHECK(done);
  CHECK(env.collected()[1]);
}

TEST_CASE("item gathering placement is seed-deterministic") {
  ItemGatheringEnv a(default_spec(EnvName::ItemGathering)), b(default_spec(EnvName::ItemGathering));
  a.reset(99);
  b.reset(99);
  CHECK(a.items() == b.items());
  CHECK(a.remaining_items() == 6);
  b.reset(100);
  CHECK(a.items() != b.items());
  CHECK(a.agent() == Position{7, 0});
  CHECK(a.other() == Position{0, 7});
}

TEST_CASE("item gathering observation is centred on the agent") {
  ItemGatheringEnv env(default_spec(EnvName::ItemGathering));
  env.reset(7);
  const std::size_t window = 15 * 15;
  REQUIRE(env.observation_size() == 4 * window + 64);
  auto plane_sum = [&](const std::vector<double>& o, std::size_t plane) {
    double s = 0;
    for (std::size_t i = plane * window; i < (plane + 1) * window; ++i) s += o[i];
    return s;
  };
  const auto obs = env.observation();
  CHECK(plane_sum(obs, 0) + plane_sum(obs, 1) + plane_sum(obs, 2) == 6);
  CHECK(plane_sum(obs, 3) == 1);
  CHECK(obs[4 * window + 7 * 8 + 0] == 1.0);
  // The other agent at (0, 7) seen from (7, 0) sits 7 rows up and 7 columns right.
  CHECK(obs[3 * window + (0 - 7 + 7) * 15 + (7 - 0 + 7)] == 1.0);
  // An item at a fixed offset stays put in the window only relative to the agent.
  const auto items = env.items();
  for (std::size_t cell = 0; cell < items.size(); ++cell) {
    if (items[cell] == ItemGatheringEnv::kNoItem) continue;
    const int r = static_cast<int>(cell) / 8, c = static_cast<int>(cell) % 8;
    CHECK(obs[static_cast<std::size_t>(items[cell]) * window + static_cast<std::size_t>((r - 7 + 7) * 15 + (c + 7))] == 1.0);
  }
}

TEST_CASE("item gathering rewards the other agent only for red items") {
  ItemGatheringEnv env(default_spec(EnvName::ItemGathering));
  const int red = static_cast<int>(ItemColor::Red);
  int red_pickups = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    env.reset(seed);
    for (;;) {
      const auto before = env.items();
      auto s = env.step(kLeft);  // agent hugs the wall and never moves
      CHECK(s.reward[1] == -1.0);
      if (s.reward[5] > 0) {
        ++red_pickups;
        CHECK(before[static_cast<std::size_t>(env.spec().grid.index(env.other()))] == red);
      }
      if (s.done) break;
    }
    CHECK(std::count(env.items().begin(), env.items().end(), red) == 0);
  }
  CHECK(red_pickups == 40);
}

TEST_CASE("same seed and actions replay identically") {
  Rng rng(8);
  std::uniform_int_distribution<int> act(0, 3);
  std::vector<int> actions(120);
  for (auto& a : actions) a = act(rng);
  for (auto name : {EnvName::Cdst, EnvName::Traffic, EnvName::ItemGathering}) {
    auto env = make_environment(name);
    CHECK(same(replay(*env, 17, actions), replay(*env, 17, actions)));
  }
}

TEST_CASE("scenario vectors") {
  const auto traffic = scenario_preferences(EnvName::Traffic);
  CHECK(find_scenario(traffic, "Always Fast").preference.weights() ==
        std::vector<double>{0.12, 0.62, 0.12, 0.13, 0.01});
  const auto ig = scenario_preferences(EnvName::ItemGathering);
  const auto& generous = find_scenario(ig, "Generous").preference;
  CHECK(generous.weights() == std::vector<double>{0.02, 0.08, 0.30, 0.00, 0.30, 0.30});
  CHECK(generous.cooperative() == true);
  const auto& competitive = find_scenario(ig, "competitive").preference;
  CHECK(competitive.weights() == std::vector<double>{0.02, 0.08, 0.15, 0.30, 0.15, 0.30});
  CHECK(competitive.cooperative() == false);
  for (const auto* list : {&traffic, &ig}) {
    CHECK(list->size() == 4);
    for (const auto& s : *list) {
      double sum = 0;
      for (double w : s.preference.weights()) sum += w;
      CHECK(std::abs(sum - 1.0) <= 0.01);
    }
  }
  CHECK_THROWS(scenario_preferences(EnvName::Cdst));
}

TEST_CASE("grid file parsing") {
  const auto g = parse_grid("; comment\nS . T5\n# R G\n");
  CHECK(g.rows == 2);
  CHECK(g.cols == 3);
  CHECK(g.start == Position{0, 0});
  REQUIRE(g.treasures.size() == 1);
  CHECK(g.treasures[0].value == 5.0);
  CHECK(g.at({1, 0}) == Terrain::Wall);
  CHECK(g.at({1, 1}) == Terrain::Road);
  REQUIRE(g.items.size() == 1);
  CHECK(g.items[0].color == ItemColor::Green);
  const auto compact = parse_grid("S.#\n..D\n");
  CHECK(compact.cols == 3);
  CHECK(compact.items[0].color == ItemColor::Red);
  CHECK_THROWS(parse_grid("S . .\n. .\n"));
}
