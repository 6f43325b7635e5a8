#ifndef TETIQA_TILING_H_
#define TETIQA_TILING_H_

// Tetromino coverings of a 4x4 board.
//
// A covering partitions the 16 cells of a 4x4 block into four tetrominoes.
// There are 117 of them; up to the 8 symmetries of the square they fall into
// 22 orbits. The covering dictionary built here is what the tetrolet
// transform searches per block, and covering indices stored in a
// decomposition refer to positions in this dictionary.
//
// Canonical forms:
//  - cells of a piece are kept in row-major order (top-to-bottom, then
//    left-to-right); this order is also the Haar slot order.
//  - pieces in a covering are numbered by the row-major position of their
//    first cell, i.e. labels appear in the order 0,1,2,3 when the label grid
//    is read row-major.
//  - the dictionary starts with the 2x2-squares covering (classical Haar),
//    followed by all other coverings sorted by their row-major label grid.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tetiqa {

inline constexpr int kBoardSize = 4;
inline constexpr int kBoardCells = kBoardSize * kBoardSize;
inline constexpr int kNumCoverings = 117;
inline constexpr int kNumFundamentalForms = 22;

struct Cell {
  int row = 0;
  int col = 0;

  auto operator<=>(const Cell&) const = default;
};

// Four cells of one piece, kept in row-major order.
struct Tetromino {
  std::array<Cell, 4> cells;

  bool operator==(const Tetromino&) const = default;
};

// True if the four cells are distinct, lie on the 4x4 board and are
// rook-connected.
bool IsValidTetromino(std::span<const Cell> cells);

// Row-major cell order of a piece; defines the cell-to-Haar-slot bijection.
Tetromino PieceCellOrder(const Tetromino& piece);

// One free tetromino with all its distinct fixed orientations, each
// translated so that its bounding box starts at (0, 0).
struct FreeTetromino {
  char name;  // I, O, T, S, L
  std::vector<Tetromino> orientations;
};

std::vector<FreeTetromino> EnumerateFreeTetrominoes();

// Every fixed tetromino placement that fits on the 4x4 board.
std::vector<Tetromino> EnumeratePlacements();

using LabelGrid = std::array<std::uint8_t, kBoardCells>;

struct Covering {
  LabelGrid labels{};                // row-major piece label per cell
  std::array<Tetromino, 4> pieces{};  // piece p holds the cells labelled p
  int index = -1;

  std::uint8_t label(int row, int col) const {
    return labels[row * kBoardSize + col];
  }
};

// All 117 coverings in canonical order; index i is stored in element i.
std::vector<Covering> EnumerateCoverings();

// Process-wide, read-only copy of EnumerateCoverings().
const std::vector<Covering>& CoveringDictionary();

// Applies symmetry `s` in [0, 8) of the square to a label grid and relabels
// pieces by first appearance. s = 0 is the identity, 1..3 rotate by 90
// degrees s times, 4..7 transpose first and then rotate.
LabelGrid TransformLabels(const LabelGrid& labels, int symmetry);

// Partitions the coverings into orbits under the symmetry group of the
// square. Each orbit lists covering indices in increasing order; orbits are
// ordered by their smallest index.
std::vector<std::vector<int>> FundamentalForms(
    std::span<const Covering> coverings);

// 4 lines of 4 characters, piece labels rendered as A-D.
std::string FormatCovering(const Covering& covering);

}  // namespace tetiqa

#endif  // TETIQA_TILING_H_
