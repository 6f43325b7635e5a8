#ifndef TETIQA_TETROLET_H_
#define TETIQA_TETROLET_H_

// Adaptive tetrolet decomposition.
//
// Each 4x4 block is transformed with every covering of the dictionary: the
// four cells of each piece are mapped to Haar slots in row-major order and
// the orthonormal 4-point Haar matrix
//
//   1/2 * [ 1  1  1  1 ]   low-pass
//         [ 1  1 -1 -1 ]   orientation 1
//         [ 1 -1  1 -1 ]   orientation 2
//         [ 1 -1 -1  1 ]   orientation 3
//
// is applied. The covering whose 12 detail coefficients have the smallest
// l1 norm is kept (ties go to the smaller covering index). For the
// 2x2-squares covering this is exactly the classical 2-D block Haar.
//
// Per block, the four values of the low-pass vector and of each detail
// vector are laid out as a 2x2 tile [v0 v2; v1 v3] in the next level's input
// and in the subband planes respectively.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tetiqa/image.h"
#include "tetiqa/tiling.h"

namespace tetiqa {

inline constexpr int kNumOrientations = 3;

struct HaarCoefficients {
  double lowpass = 0.0;
  std::array<double, 3> details{};
};

HaarCoefficients HaarOnSlots(const std::array<double, 4>& values);
std::array<double, 4> InverseHaarOnSlots(const HaarCoefficients& coeffs);

// Row-major 4x4 block.
using Block = std::array<double, kBoardCells>;

struct BlockCoefficients {
  std::array<double, 4> lowpass{};                  // indexed by piece
  std::array<std::array<double, 4>, 3> details{};  // [orientation][piece]
  int covering_index = 0;
  double l1_cost = 0.0;
};

BlockCoefficients TransformBlockWithCovering(const Block& block,
                                             const Covering& covering);

// Searches the full dictionary for the l1-optimal covering.
BlockCoefficients TransformBlock(const Block& block,
                                 std::span<const Covering> dictionary);

Block InverseBlock(const BlockCoefficients& coeffs, const Covering& covering);

// Covering index per 4x4 block of one level, row-major over blocks.
struct CoveringMap {
  std::size_t blocks_x = 0;
  std::size_t blocks_y = 0;
  std::vector<std::uint8_t> indices;

  std::uint8_t at(std::size_t block_row, std::size_t block_col) const {
    return indices[block_row * blocks_x + block_col];
  }
};

struct DecompositionLevel {
  std::array<ImagePlane, kNumOrientations> details;  // orientation 1..3
  CoveringMap coverings;
};

struct TetroletDecomposition {
  std::vector<DecompositionLevel> levels;  // finest first
  ImagePlane lowpass;                      // coarsest low-pass plane
};

// Throws InvalidInput unless levels >= 1 and both image dimensions are
// positive multiples of 4 * 2^(levels - 1).
TetroletDecomposition Forward(const ImagePlane& image, int levels);

// Exact inverse of Forward. Throws InvalidInput when a level's covering map
// or subband planes do not match the expected geometry.
ImagePlane Inverse(const TetroletDecomposition& decomposition);

// Debug dump: level<r>_w<l>.txt for each subband, level<r>_coverings.txt
// and lowpass.txt, each a whitespace-separated plain-text matrix.
void WriteDecompositionDump(const TetroletDecomposition& decomposition,
                            const std::filesystem::path& directory);

}  // namespace tetiqa

#endif  // TETIQA_TETROLET_H_
