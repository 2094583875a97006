#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dwpi::envs {

struct Position {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Position&, const Position&) = default;
};

enum class Terrain : unsigned char { Free, Wall, Road };
enum class ItemColor : unsigned char { Green, Red, Yellow };

struct Treasure {
  Position pos;
  double value = 0.0;
};

struct Item {
  Position pos;
  ItemColor color = ItemColor::Green;
};

/// Parsed plain-text layout.
///
/// Cells are separated by whitespace, or written one character per cell when
/// a row has no spaces. Tokens: '#' wall, '.' free, 'R' road, 'C' road with a
/// car, 'S' agent start, 'O' start of the scripted agent, 'G'/'D'/'Y' green,
/// red and yellow items, 'T<value>' treasure. Lines starting with ';' are
/// comments.
struct GridLayout {
  int rows = 0;
  int cols = 0;
  std::vector<Terrain> terrain;
  std::vector<Treasure> treasures;
  std::vector<Item> items;
  std::vector<Position> cars;
  std::optional<Position> start;
  std::optional<Position> other_start;

  bool inside(Position p) const { return p.row >= 0 && p.col >= 0 && p.row < rows && p.col < cols; }
  Terrain at(Position p) const { return terrain[static_cast<std::size_t>(p.row * cols + p.col)]; }
  bool walkable(Position p) const { return inside(p) && at(p) != Terrain::Wall; }
  int index(Position p) const { return p.row * cols + p.col; }
};

GridLayout parse_grid(std::string_view text);
GridLayout load_grid_file(const std::string& path);

}  // namespace dwpi::envs
