#include "dwpi/envs/environment.hpp"

#include <stdexcept>

#include "dwpi/envs/cdst.hpp"
#include "dwpi/envs/item_gathering.hpp"
#include "dwpi/envs/traffic.hpp"

namespace dwpi::envs {

namespace {

// Deep Sea Treasure with the convex treasure values; seabed below each
// treasure is impassable.
constexpr std::string_view kCdstLayout = R"(
S    .    .    .    .    .    .    .    .    .
T1   .    .    .    .    .    .    .    .    .
#    T34  .    .    .    .    .    .    .    .
#    #    T58  .    .    .    .    .    .    .
#    #    #    T78  T86  T92  .    .    .    .
#    #    #    #    #    #    .    .    .    .
#    #    #    #    #    #    .    .    .    .
#    #    #    #    #    #    T112 T116 .    .
#    #    #    #    #    #    #    #    .    .
#    #    #    #    #    #    #    #    T122 .
#    #    #    #    #    #    #    #    #    T124
)";

// Two vertical roads with one car each; the bottom corridor is the only way
// across without stepping on a road.
constexpr std::string_view kTrafficLayout = R"(
G.R..R.G
..R..R..
..C..R..
..R..C..
..R..R..
..R..R..
..#..#..
S.......
)";

// Open room; item markers only fix the per-colour counts, positions are
// re-sampled every episode.
constexpr std::string_view kItemGatheringLayout = R"(
.......O
........
........
..GDY...
..GDY...
........
........
S.......
)";

}  // namespace

std::string_view to_string(EnvName name) {
  switch (name) {
    case EnvName::Cdst: return "cdst";
    case EnvName::Traffic: return "traffic";
    case EnvName::ItemGathering: return "item_gathering";
  }
  return "unknown";
}

EnvName parse_env_name(std::string_view text) {
  if (text == "cdst") return EnvName::Cdst;
  if (text == "traffic") return EnvName::Traffic;
  if (text == "item_gathering") return EnvName::ItemGathering;
  throw std::invalid_argument("unknown environment '" + std::string(text) + "'");
}

Position apply_action(Position p, int action) {
  switch (action) {
    case kUp: return {p.row - 1, p.col};
    case kDown: return {p.row + 1, p.col};
    case kLeft: return {p.row, p.col - 1};
    case kRight: return {p.row, p.col + 1};
    default: throw std::invalid_argument("invalid action " + std::to_string(action));
  }
}

EnvSpec spec_with_grid(EnvName name, GridLayout grid) {
  EnvSpec spec;
  spec.name = name;
  spec.grid = std::move(grid);
  switch (name) {
    case EnvName::Cdst:
      spec.objective_names = {"time", "treasure"};
      spec.max_steps = 50;
      break;
    case EnvName::Traffic:
      spec.objective_names = {"steps", "item_collection", "traffic_rules", "collisions", "wall_hitting"};
      spec.max_steps = 100;
      break;
    case EnvName::ItemGathering:
      spec.objective_names = {"steps", "wall_hitting", "green", "red", "yellow", "other_agent"};
      spec.max_steps = 100;
      spec.items_per_color = 0;
      for (const auto& item : spec.grid.items)
        if (item.color == ItemColor::Green) ++spec.items_per_color;
      break;
  }
  spec.objective_count = spec.objective_names.size();
  return spec;
}

EnvSpec default_spec(EnvName name) {
  switch (name) {
    case EnvName::Cdst: return spec_with_grid(name, parse_grid(kCdstLayout));
    case EnvName::Traffic: return spec_with_grid(name, parse_grid(kTrafficLayout));
    case EnvName::ItemGathering: return spec_with_grid(name, parse_grid(kItemGatheringLayout));
  }
  throw std::invalid_argument("unknown environment");
}

Environment::Environment(EnvSpec spec) : spec_(std::move(spec)) {
  if (!spec_.grid.start) throw std::invalid_argument("layout has no agent start 'S'");
  if (spec_.max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
}

std::vector<double> Environment::observation() const {
  std::vector<double> out(observation_size());
  observe(out);
  return out;
}

bool Environment::tick() {
  ++steps_;
  return steps_ >= spec_.max_steps;
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
  switch (spec.name) {
    case EnvName::Cdst: return std::make_unique<CdstEnv>(spec);
    case EnvName::Traffic: return std::make_unique<TrafficEnv>(spec);
    case EnvName::ItemGathering: return std::make_unique<ItemGatheringEnv>(spec);
  }
  throw std::invalid_argument("unknown environment");
}

std::unique_ptr<Environment> make_environment(EnvName name) { return make_environment(default_spec(name)); }

}  // namespace dwpi::envs
