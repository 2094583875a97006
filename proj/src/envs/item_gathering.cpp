#include "dwpi/envs/item_gathering.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace dwpi::envs {

namespace {

enum Objective : std::size_t { kSteps = 0, kWalls = 1, kGreen = 2, kRed = 3, kYellow = 4, kOther = 5 };

constexpr int kUnreachable = std::numeric_limits<int>::max();

std::size_t color_objective(int color) {
  switch (static_cast<ItemColor>(color)) {
    case ItemColor::Green: return kGreen;
    case ItemColor::Red: return kRed;
    case ItemColor::Yellow: return kYellow;
  }
  return kGreen;
}

}  // namespace

ItemGatheringEnv::ItemGatheringEnv(EnvSpec spec) : Environment(std::move(spec)) {
  if (!spec_.grid.other_start) throw std::invalid_argument("item gathering layout has no scripted agent 'O'");
  if (spec_.items_per_color <= 0) throw std::invalid_argument("item gathering needs at least one item per colour");
  reset(spec_.seed);
}

std::uint64_t ItemGatheringEnv::reset(std::uint64_t seed) {
  const auto& grid = spec_.grid;
  rng_.seed(seed);
  steps_ = 0;
  agent_ = *grid.start;
  other_ = *grid.other_start;
  items_.assign(static_cast<std::size_t>(grid.rows * grid.cols), kNoItem);

  std::vector<int> free_cells;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const Position p{r, c};
      if (grid.at(p) != Terrain::Wall && p != agent_ && p != other_) free_cells.push_back(grid.index(p));
    }
  const std::size_t needed = 3 * static_cast<std::size_t>(spec_.items_per_color);
  if (free_cells.size() < needed) throw std::invalid_argument("not enough free cells for items");
  // Partial Fisher-Yates keeps placement reproducible for a given seed.
  for (std::size_t i = 0; i < needed; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, free_cells.size() - 1);
    std::swap(free_cells[i], free_cells[pick(rng_)]);
    items_[static_cast<std::size_t>(free_cells[i])] = static_cast<int>(i % 3);
  }
  return state_id();
}

int ItemGatheringEnv::remaining_items() const {
  return static_cast<int>(std::count_if(items_.begin(), items_.end(), [](int x) { return x != kNoItem; }));
}

std::vector<int> ItemGatheringEnv::bfs_distances(Position from) const {
  const auto& grid = spec_.grid;
  std::vector<int> dist(items_.size(), kUnreachable);
  std::deque<Position> frontier{from};
  dist[static_cast<std::size_t>(grid.index(from))] = 0;
  while (!frontier.empty()) {
    const Position p = frontier.front();
    frontier.pop_front();
    for (int a = 0; a < kActionCount; ++a) {
      const Position q = apply_action(p, a);
      if (!grid.walkable(q)) continue;
      auto& d = dist[static_cast<std::size_t>(grid.index(q))];
      if (d != kUnreachable) continue;
      d = dist[static_cast<std::size_t>(grid.index(p))] + 1;
      frontier.push_back(q);
    }
  }
  return dist;
}

void ItemGatheringEnv::move_other_agent() {
  const auto& grid = spec_.grid;
  const int red = static_cast<int>(ItemColor::Red);
  const auto from_other = bfs_distances(other_);

  // Nearest red item; ties broken uniformly.
  std::vector<Position> targets;
  int best = kUnreachable;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const Position p{r, c};
      const auto idx = static_cast<std::size_t>(grid.index(p));
      if (items_[idx] != red || from_other[idx] == kUnreachable) continue;
      if (from_other[idx] < best) {
        best = from_other[idx];
        targets.clear();
      }
      if (from_other[idx] == best) targets.push_back(p);
    }
  if (targets.empty()) return;
  std::uniform_int_distribution<std::size_t> pick_target(0, targets.size() - 1);
  const Position target = targets[pick_target(rng_)];

  const auto to_target = bfs_distances(target);
  const int here = to_target[static_cast<std::size_t>(grid.index(other_))];
  std::vector<Position> moves;
  for (int a = 0; a < kActionCount; ++a) {
    const Position q = apply_action(other_, a);
    if (grid.walkable(q) && to_target[static_cast<std::size_t>(grid.index(q))] == here - 1) moves.push_back(q);
  }
  if (moves.empty()) return;
  std::uniform_int_distribution<std::size_t> pick_move(0, moves.size() - 1);
  other_ = moves[pick_move(rng_)];
}

StepResult ItemGatheringEnv::step(int action) {
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
  auto& mine = items_[static_cast<std::size_t>(grid.index(agent_))];
  if (mine != kNoItem) {
    out.reward[color_objective(mine)] += 1.0;
    mine = kNoItem;
  }

  move_other_agent();
  auto& theirs = items_[static_cast<std::size_t>(grid.index(other_))];
  if (theirs == static_cast<int>(ItemColor::Red)) {
    out.reward[kOther] += 1.0;
    theirs = kNoItem;
  }

  out.terminal = remaining_items() == 0;
  const bool out_of_time = tick();
  out.done = out.terminal || out_of_time;
  out.next_state = state_id();
  return out;
}

std::uint64_t ItemGatheringEnv::state_id() const {
  const auto& grid = spec_.grid;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  for (int v : items_) feed(static_cast<std::uint64_t>(v + 1));
  feed(static_cast<std::uint64_t>(grid.index(agent_)));
  feed(static_cast<std::uint64_t>(grid.index(other_)));
  return h;
}

// Item and other-agent planes are centred on the agent: a (2R-1) x (2C-1)
// window covers the whole grid from any cell. The agent's own cell follows as
// an absolute one-hot.
std::size_t ItemGatheringEnv::observation_size() const {
  const auto& grid = spec_.grid;
  const auto window = static_cast<std::size_t>((2 * grid.rows - 1) * (2 * grid.cols - 1));
  return 4 * window + items_.size();
}

void ItemGatheringEnv::observe(std::span<double> out) const {
  const auto& grid = spec_.grid;
  std::fill(out.begin(), out.end(), 0.0);
  const int width = 2 * grid.cols - 1;
  const auto window = static_cast<std::size_t>((2 * grid.rows - 1) * width);
  auto relative = [&](Position p) {
    return static_cast<std::size_t>((p.row - agent_.row + grid.rows - 1) * width + (p.col - agent_.col + grid.cols - 1));
  };
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const int item = items_[static_cast<std::size_t>(grid.index({r, c}))];
      if (item != kNoItem) out[static_cast<std::size_t>(item) * window + relative({r, c})] = 1.0;
    }
  out[3 * window + relative(other_)] = 1.0;
  out[4 * window + static_cast<std::size_t>(grid.index(agent_))] = 1.0;
}

std::vector<double> ItemGatheringEnv::return_upper_bound() const {
  const double n = spec_.items_per_color;
  return {0.0, 0.0, n, n, n, n};
}

std::unique_ptr<Environment> ItemGatheringEnv::clone() const { return std::make_unique<ItemGatheringEnv>(*this); }

}  // namespace dwpi::envs
