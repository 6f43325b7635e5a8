#include "tetiqa/tiling.h"

#include <algorithm>
#include <map>
#include <set>

namespace tetiqa {
namespace {

Tetromino Normalized(std::array<Cell, 4> cells) {
  int min_row = cells[0].row;
  int min_col = cells[0].col;
  for (const Cell& c : cells) {
    min_row = std::min(min_row, c.row);
    min_col = std::min(min_col, c.col);
  }
  for (Cell& c : cells) {
    c.row -= min_row;
    c.col -= min_col;
  }
  std::sort(cells.begin(), cells.end());
  return Tetromino{cells};
}

// The free tetrominoes, one representative each.
constexpr std::array<std::pair<char, std::array<Cell, 4>>, 5> kFreeShapes = {{
    {'I', {{{0, 0}, {0, 1}, {0, 2}, {0, 3}}}},
    {'O', {{{0, 0}, {0, 1}, {1, 0}, {1, 1}}}},
    {'T', {{{0, 0}, {0, 1}, {0, 2}, {1, 1}}}},
    {'S', {{{0, 1}, {0, 2}, {1, 0}, {1, 1}}}},
    {'L', {{{0, 0}, {1, 0}, {2, 0}, {2, 1}}}},
}};

Cell ApplyToCell(Cell c, int symmetry) {
  if (symmetry >= 4) std::swap(c.row, c.col);
  for (int i = 0; i < symmetry % 4; ++i) c = Cell{c.col, -c.row};
  return c;
}

LabelGrid RelabelByFirstAppearance(const LabelGrid& labels) {
  std::array<int, 4> mapping;
  mapping.fill(-1);
  int next = 0;
  LabelGrid out{};
  for (int i = 0; i < kBoardCells; ++i) {
    int& m = mapping[labels[i]];
    if (m < 0) m = next++;
    out[i] = static_cast<std::uint8_t>(m);
  }
  return out;
}

Covering MakeCovering(const LabelGrid& labels) {
  Covering covering;
  covering.labels = labels;
  std::array<int, 4> filled{};
  for (int i = 0; i < kBoardCells; ++i) {
    const int p = labels[i];
    covering.pieces[p].cells[filled[p]++] =
        Cell{i / kBoardSize, i % kBoardSize};
  }
  return covering;
}

void Backtrack(const std::vector<Tetromino>& placements, LabelGrid& labels,
               std::uint16_t covered, int next_label,
               std::vector<LabelGrid>& out) {
  if (covered == 0xFFFF) {
    out.push_back(labels);
    return;
  }
  int first = 0;
  while (covered & (1u << first)) ++first;
  const Cell target{first / kBoardSize, first % kBoardSize};
  for (const Tetromino& t : placements) {
    if (std::find(t.cells.begin(), t.cells.end(), target) == t.cells.end()) {
      continue;
    }
    std::uint16_t mask = 0;
    for (const Cell& c : t.cells) mask |= 1u << (c.row * kBoardSize + c.col);
    if (mask & covered) continue;
    for (const Cell& c : t.cells) {
      labels[c.row * kBoardSize + c.col] = static_cast<std::uint8_t>(next_label);
    }
    Backtrack(placements, labels, covered | mask, next_label + 1, out);
  }
}

bool IsAllSquares(const LabelGrid& labels) {
  static constexpr LabelGrid kSquares = {0, 0, 1, 1, 0, 0, 1, 1,
                                         2, 2, 3, 3, 2, 2, 3, 3};
  return labels == kSquares;
}

}  // namespace

bool IsValidTetromino(std::span<const Cell> cells) {
  if (cells.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const Cell& c = cells[i];
    if (c.row < 0 || c.row >= kBoardSize || c.col < 0 || c.col >= kBoardSize) {
      return false;
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (cells[j] == c) return false;
    }
  }
  // Flood fill from the first cell.
  std::array<bool, 4> reached{true, false, false, false};
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < 4; ++i) {
      if (reached[i]) continue;
      for (std::size_t j = 0; j < 4; ++j) {
        if (!reached[j]) continue;
        if (std::abs(cells[i].row - cells[j].row) +
                std::abs(cells[i].col - cells[j].col) ==
            1) {
          reached[i] = grew = true;
          break;
        }
      }
    }
  }
  return std::all_of(reached.begin(), reached.end(), [](bool r) { return r; });
}

Tetromino PieceCellOrder(const Tetromino& piece) {
  Tetromino ordered = piece;
  std::sort(ordered.cells.begin(), ordered.cells.end());
  return ordered;
}

std::vector<FreeTetromino> EnumerateFreeTetrominoes() {
  std::vector<FreeTetromino> shapes;
  for (const auto& [name, cells] : kFreeShapes) {
    FreeTetromino shape{name, {}};
    for (int s = 0; s < 8; ++s) {
      std::array<Cell, 4> moved;
      for (std::size_t i = 0; i < 4; ++i) moved[i] = ApplyToCell(cells[i], s);
      const Tetromino t = Normalized(moved);
      if (std::find(shape.orientations.begin(), shape.orientations.end(), t) ==
          shape.orientations.end()) {
        shape.orientations.push_back(t);
      }
    }
    shapes.push_back(std::move(shape));
  }
  return shapes;
}

std::vector<Tetromino> EnumeratePlacements() {
  std::vector<Tetromino> placements;
  for (const FreeTetromino& shape : EnumerateFreeTetrominoes()) {
    for (const Tetromino& t : shape.orientations) {
      for (int dr = 0; dr < kBoardSize; ++dr) {
        for (int dc = 0; dc < kBoardSize; ++dc) {
          Tetromino moved = t;
          bool inside = true;
          for (Cell& c : moved.cells) {
            c.row += dr;
            c.col += dc;
            inside = inside && c.row < kBoardSize && c.col < kBoardSize;
          }
          if (inside) placements.push_back(moved);
        }
      }
    }
  }
  return placements;
}

std::vector<Covering> EnumerateCoverings() {
  const std::vector<Tetromino> placements = EnumeratePlacements();
  std::vector<LabelGrid> grids;
  LabelGrid scratch{};
  Backtrack(placements, scratch, 0, 0, grids);

  std::sort(grids.begin(), grids.end(),
            [](const LabelGrid& a, const LabelGrid& b) {
              const bool sa = IsAllSquares(a);
              const bool sb = IsAllSquares(b);
              if (sa != sb) return sa;
              return a < b;
            });

  std::vector<Covering> coverings;
  coverings.reserve(grids.size());
  for (const LabelGrid& g : grids) {
    Covering c = MakeCovering(g);
    c.index = static_cast<int>(coverings.size());
    coverings.push_back(c);
  }
  return coverings;
}

const std::vector<Covering>& CoveringDictionary() {
  static const std::vector<Covering> dictionary = EnumerateCoverings();
  return dictionary;
}

LabelGrid TransformLabels(const LabelGrid& labels, int symmetry) {
  LabelGrid out{};
  for (int r = 0; r < kBoardSize; ++r) {
    for (int c = 0; c < kBoardSize; ++c) {
      // Map (r, c) with the cell action, then shift back onto the board.
      Cell moved = ApplyToCell(Cell{r, c}, symmetry);
      const int rot = symmetry % 4;
      if (rot == 2 || rot == 3) moved.row += kBoardSize - 1;
      if (rot == 1 || rot == 2) moved.col += kBoardSize - 1;
      out[moved.row * kBoardSize + moved.col] = labels[r * kBoardSize + c];
    }
  }
  return RelabelByFirstAppearance(out);
}

std::vector<std::vector<int>> FundamentalForms(
    std::span<const Covering> coverings) {
  std::map<LabelGrid, int> position;
  for (std::size_t i = 0; i < coverings.size(); ++i) {
    position[coverings[i].labels] = static_cast<int>(i);
  }
  std::vector<int> orbit_of(coverings.size(), -1);
  std::vector<std::vector<int>> orbits;
  for (std::size_t i = 0; i < coverings.size(); ++i) {
    if (orbit_of[i] >= 0) continue;
    std::set<int> members;
    for (int s = 0; s < 8; ++s) {
      const auto it = position.find(TransformLabels(coverings[i].labels, s));
      if (it != position.end()) members.insert(it->second);
    }
    for (int m : members) orbit_of[m] = static_cast<int>(orbits.size());
    orbits.emplace_back(members.begin(), members.end());
  }
  return orbits;
}

std::string FormatCovering(const Covering& covering) {
  std::string out;
  for (int r = 0; r < kBoardSize; ++r) {
    for (int c = 0; c < kBoardSize; ++c) {
      out.push_back(static_cast<char>('A' + covering.label(r, c)));
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace tetiqa
