#include "dwpi/envs/grid.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dwpi::envs {

namespace {

std::vector<std::string> row_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  if (words.size() != 1 || words.front()[0] == 'T') return words;
  // Compact row: one character per cell.
  std::vector<std::string> cells;
  for (char c : words.front()) cells.emplace_back(1, c);
  return cells;
}

}  // namespace

GridLayout parse_grid(std::string_view text) {
  GridLayout grid;
  std::istringstream in{std::string(text)};
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    const auto cells = row_tokens(line);
    if (grid.cols == 0) grid.cols = static_cast<int>(cells.size());
    if (static_cast<int>(cells.size()) != grid.cols)
      throw std::invalid_argument("grid row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(grid.cols));
    for (int col = 0; col < grid.cols; ++col) {
      const std::string& tok = cells[static_cast<std::size_t>(col)];
      const Position pos{row, col};
      Terrain t = Terrain::Free;
      if (tok[0] == 'T') {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.size() == 1)
          throw std::invalid_argument("bad treasure token '" + tok + "'");
        grid.treasures.push_back({pos, value});
      } else if (tok.size() != 1) {
        throw std::invalid_argument("bad grid token '" + tok + "'");
      } else {
        switch (tok[0]) {
          case '#': t = Terrain::Wall; break;
          case '.': break;
          case 'R': t = Terrain::Road; break;
          case 'C': t = Terrain::Road; grid.cars.push_back(pos); break;
          case 'S': grid.start = pos; break;
          case 'O': grid.other_start = pos; break;
          case 'G': grid.items.push_back({pos, ItemColor::Green}); break;
          case 'D': grid.items.push_back({pos, ItemColor::Red}); break;
          case 'Y': grid.items.push_back({pos, ItemColor::Yellow}); break;
          default: throw std::invalid_argument("bad grid token '" + tok + "'");
        }
      }
      grid.terrain.push_back(t);
    }
    ++row;
  }
  grid.rows = row;
  if (grid.rows == 0 || grid.cols == 0) throw std::invalid_argument("empty grid");
  return grid;
}

GridLayout load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str());
}

}  // namespace dwpi::envs
