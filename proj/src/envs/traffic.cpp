#include "dwpi/envs/traffic.hpp"

#include <algorithm>

namespace dwpi::envs {

namespace {

enum Objective : std::size_t { kSteps = 0, kItems = 1, kRules = 2, kCollisions = 3, kWalls = 4 };

bool is_road(const GridLayout& grid, Position p) { return grid.inside(p) && grid.at(p) == Terrain::Road; }

}  // namespace

TrafficEnv::TrafficEnv(EnvSpec spec) : Environment(std::move(spec)) {
  if (spec_.grid.items.empty()) throw std::invalid_argument("traffic layout has no items");
  reset(spec_.seed);
}

std::uint64_t TrafficEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  steps_ = 0;
  agent_ = *spec_.grid.start;
  cars_.clear();
  std::bernoulli_distribution coin(0.5);
  for (const auto& p : spec_.grid.cars) cars_.push_back({p, coin(rng_) ? 1 : -1});
  collected_.assign(spec_.grid.items.size(), false);
  return state_id();
}

void TrafficEnv::advance_car(const GridLayout& grid, Car& car) {
  Position next{car.pos.row + car.direction, car.pos.col};
  if (!is_road(grid, next)) {
    car.direction = -car.direction;
    next = {car.pos.row + car.direction, car.pos.col};
    if (!is_road(grid, next)) return;
  }
  car.pos = next;
}

StepResult TrafficEnv::step(int action) {
  const auto& grid = spec_.grid;
  StepResult out;
  out.reward.assign(spec_.objective_count, 0.0);
  out.reward[kSteps] = -1.0;

  const Position next = apply_action(agent_, action);
  if (grid.walkable(next)) {
    agent_ = next;
  } else {
    out.reward[kWalls] = -1.0;
  }
  for (auto& car : cars_) advance_car(grid, car);

  for (std::size_t i = 0; i < grid.items.size(); ++i) {
    if (!collected_[i] && grid.items[i].pos == agent_) {
      collected_[i] = true;
      out.reward[kItems] += 1.0;
    }
  }
  if (is_road(grid, agent_)) out.reward[kRules] = -1.0;
  if (std::any_of(cars_.begin(), cars_.end(), [&](const Car& c) { return c.pos == agent_; }))
    out.reward[kCollisions] = -1.0;

  out.terminal = std::all_of(collected_.begin(), collected_.end(), [](bool b) { return b; });
  const bool out_of_time = tick();
  out.done = out.terminal || out_of_time;
  out.next_state = state_id();
  return out;
}

std::uint64_t TrafficEnv::state_id() const {
  const auto& grid = spec_.grid;
  std::uint64_t id = static_cast<std::uint64_t>(grid.index(agent_));
  for (const auto& car : cars_) {
    id = id * static_cast<std::uint64_t>(grid.rows) + static_cast<std::uint64_t>(car.pos.row);
    id = id * 2 + (car.direction > 0 ? 1 : 0);
  }
  for (bool c : collected_) id = id * 2 + (c ? 1 : 0);
  return id;
}

std::size_t TrafficEnv::observation_size() const {
  const auto& grid = spec_.grid;
  return static_cast<std::size_t>(grid.rows * grid.cols) + cars_.size() * static_cast<std::size_t>(grid.rows + 1) +
         collected_.size();
}

void TrafficEnv::observe(std::span<double> out) const {
  const auto& grid = spec_.grid;
  std::fill(out.begin(), out.end(), 0.0);
  std::size_t offset = 0;
  out[static_cast<std::size_t>(grid.index(agent_))] = 1.0;
  offset += static_cast<std::size_t>(grid.rows * grid.cols);
  for (const auto& car : cars_) {
    out[offset + static_cast<std::size_t>(car.pos.row)] = 1.0;
    out[offset + static_cast<std::size_t>(grid.rows)] = car.direction > 0 ? 1.0 : -1.0;
    offset += static_cast<std::size_t>(grid.rows + 1);
  }
  for (bool c : collected_) out[offset++] = c ? 1.0 : 0.0;
}

std::vector<double> TrafficEnv::return_upper_bound() const {
  std::vector<double> ub(spec_.objective_count, 0.0);
  ub[kItems] = static_cast<double>(spec_.grid.items.size());
  return ub;
}

std::unique_ptr<Environment> TrafficEnv::clone() const { return std::make_unique<TrafficEnv>(*this); }

}  // namespace dwpi::envs
