#include "dwpi/envs/cdst.hpp"

#include <algorithm>

namespace dwpi::envs {

CdstEnv::CdstEnv(EnvSpec spec) : Environment(std::move(spec)) {
  const auto& grid = spec_.grid;
  if (grid.treasures.empty()) throw std::invalid_argument("cdst layout has no treasures");
  treasure_index_.assign(static_cast<std::size_t>(grid.rows * grid.cols), -1);
  for (std::size_t i = 0; i < grid.treasures.size(); ++i)
    treasure_index_[static_cast<std::size_t>(grid.index(grid.treasures[i].pos))] = static_cast<int>(i);
  pos_ = *grid.start;
}

int CdstEnv::treasure_at(Position p) const {
  if (!spec_.grid.inside(p)) return -1;
  return treasure_index_[static_cast<std::size_t>(spec_.grid.index(p))];
}

std::uint64_t CdstEnv::reset(std::uint64_t /*seed*/) {
  pos_ = *spec_.grid.start;
  steps_ = 0;
  return state_id();
}

StepResult CdstEnv::step(int action) {
  const Position next = apply_action(pos_, action);
  if (spec_.grid.walkable(next)) pos_ = next;

  StepResult out;
  out.reward = {-1.0, 0.0};
  const int t = treasure_at(pos_);
  if (t >= 0) {
    out.reward[1] = spec_.grid.treasures[static_cast<std::size_t>(t)].value;
    out.terminal = true;
  }
  const bool out_of_time = tick();
  out.done = out.terminal || out_of_time;
  out.next_state = state_id();
  return out;
}

std::uint64_t CdstEnv::state_id() const { return static_cast<std::uint64_t>(spec_.grid.index(pos_)); }

std::optional<std::size_t> CdstEnv::tabular_state_count() const {
  return static_cast<std::size_t>(spec_.grid.rows * spec_.grid.cols);
}

std::size_t CdstEnv::observation_size() const { return static_cast<std::size_t>(spec_.grid.rows * spec_.grid.cols); }

void CdstEnv::observe(std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[state_id()] = 1.0;
}

std::vector<double> CdstEnv::return_upper_bound() const {
  double best = 0.0;
  for (const auto& t : spec_.grid.treasures) best = std::max(best, t.value);
  return {0.0, best};
}

std::unique_ptr<Environment> CdstEnv::clone() const { return std::make_unique<CdstEnv>(*this); }

}  // namespace dwpi::envs
