#include "tetiqa/tetrolet.h"

#include <cmath>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "tetiqa/errors.h"

namespace tetiqa {
namespace {

// Position of slot s inside a 2x2 tile: [v0 v2; v1 v3].
constexpr std::size_t TileRow(int s) { return static_cast<std::size_t>(s % 2); }
constexpr std::size_t TileCol(int s) { return static_cast<std::size_t>(s / 2); }

void CheckDimensions(std::size_t width, std::size_t height, int levels) {
  if (levels < 1) {
    throw InvalidInput(fmt::format("tetrolet: levels must be >= 1, got {}",
                                   levels));
  }
  const std::size_t multiple = std::size_t{4} << (levels - 1);
  if (width == 0 || height == 0 || width % multiple != 0 ||
      height % multiple != 0) {
    throw InvalidInput(fmt::format(
        "tetrolet: {}x{} image is not divisible by {} for {} level(s)", width,
        height, multiple, levels));
  }
}

void WriteMatrix(const std::filesystem::path& path, std::size_t rows,
                 std::size_t cols, auto&& value) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t r = 0; r < rows; ++r) {
    std::string line;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) line.push_back(' ');
      line += value(r, c);
    }
    out << line << '\n';
  }
  if (!out) throw IoError("cannot write " + path.string());
}

void WritePlane(const std::filesystem::path& path, const ImagePlane& plane) {
  WriteMatrix(path, plane.height(), plane.width(),
              [&](std::size_t r, std::size_t c) {
                return fmt::format("{:.17g}", plane.at(r, c));
              });
}

}  // namespace

HaarCoefficients HaarOnSlots(const std::array<double, 4>& v) {
  HaarCoefficients out;
  out.lowpass = 0.5 * (v[0] + v[1] + v[2] + v[3]);
  out.details[0] = 0.5 * (v[0] + v[1] - v[2] - v[3]);
  out.details[1] = 0.5 * (v[0] - v[1] + v[2] - v[3]);
  out.details[2] = 0.5 * (v[0] - v[1] - v[2] + v[3]);
  return out;
}

std::array<double, 4> InverseHaarOnSlots(const HaarCoefficients& c) {
  // The Haar matrix is symmetric and orthonormal, so it is its own inverse.
  const double a = c.lowpass;
  const auto& d = c.details;
  return {0.5 * (a + d[0] + d[1] + d[2]), 0.5 * (a + d[0] - d[1] - d[2]),
          0.5 * (a - d[0] + d[1] - d[2]), 0.5 * (a - d[0] - d[1] + d[2])};
}

BlockCoefficients TransformBlockWithCovering(const Block& block,
                                             const Covering& covering) {
  BlockCoefficients out;
  out.covering_index = covering.index;
  for (int p = 0; p < 4; ++p) {
    const Tetromino& piece = covering.pieces[p];
    std::array<double, 4> slots;
    for (int s = 0; s < 4; ++s) {
      const Cell& c = piece.cells[s];
      slots[s] = block[c.row * kBoardSize + c.col];
    }
    const HaarCoefficients h = HaarOnSlots(slots);
    out.lowpass[p] = h.lowpass;
    for (int l = 0; l < 3; ++l) {
      out.details[l][p] = h.details[l];
      out.l1_cost += std::abs(h.details[l]);
    }
  }
  return out;
}

BlockCoefficients TransformBlock(const Block& block,
                                 std::span<const Covering> dictionary) {
  if (dictionary.empty()) throw InvalidInput("tetrolet: empty dictionary");
  BlockCoefficients best = TransformBlockWithCovering(block, dictionary[0]);
  for (std::size_t i = 1; i < dictionary.size(); ++i) {
    BlockCoefficients candidate =
        TransformBlockWithCovering(block, dictionary[i]);
    if (candidate.l1_cost < best.l1_cost) best = candidate;
  }
  return best;
}

Block InverseBlock(const BlockCoefficients& coeffs, const Covering& covering) {
  Block block{};
  for (int p = 0; p < 4; ++p) {
    HaarCoefficients h;
    h.lowpass = coeffs.lowpass[p];
    for (int l = 0; l < 3; ++l) h.details[l] = coeffs.details[l][p];
    const std::array<double, 4> slots = InverseHaarOnSlots(h);
    const Tetromino& piece = covering.pieces[p];
    for (int s = 0; s < 4; ++s) {
      const Cell& c = piece.cells[s];
      block[c.row * kBoardSize + c.col] = slots[s];
    }
  }
  return block;
}

TetroletDecomposition Forward(const ImagePlane& image, int levels) {
  CheckDimensions(image.width(), image.height(), levels);
  const std::vector<Covering>& dictionary = CoveringDictionary();

  TetroletDecomposition out;
  ImagePlane current = image;
  for (int r = 0; r < levels; ++r) {
    const std::size_t bx = current.width() / 4;
    const std::size_t by = current.height() / 4;
    ImagePlane next(2 * bx, 2 * by);
    DecompositionLevel level;
    for (ImagePlane& d : level.details) d = ImagePlane(2 * bx, 2 * by);
    level.coverings = CoveringMap{bx, by, std::vector<std::uint8_t>(bx * by)};

    for (std::size_t bi = 0; bi < by; ++bi) {
      for (std::size_t bj = 0; bj < bx; ++bj) {
        Block block;
        for (int i = 0; i < kBoardSize; ++i) {
          for (int j = 0; j < kBoardSize; ++j) {
            block[i * kBoardSize + j] = current.at(4 * bi + i, 4 * bj + j);
          }
        }
        const BlockCoefficients c = TransformBlock(block, dictionary);
        level.coverings.indices[bi * bx + bj] =
            static_cast<std::uint8_t>(c.covering_index);
        for (int s = 0; s < 4; ++s) {
          const std::size_t row = 2 * bi + TileRow(s);
          const std::size_t col = 2 * bj + TileCol(s);
          next.at(row, col) = c.lowpass[s];
          for (int l = 0; l < 3; ++l) level.details[l].at(row, col) = c.details[l][s];
        }
      }
    }
    out.levels.push_back(std::move(level));
    current = std::move(next);
  }
  out.lowpass = std::move(current);
  return out;
}

ImagePlane Inverse(const TetroletDecomposition& decomposition) {
  if (decomposition.levels.empty()) {
    throw InvalidInput("tetrolet: decomposition has no levels");
  }
  const std::vector<Covering>& dictionary = CoveringDictionary();
  ImagePlane current = decomposition.lowpass;
  for (auto it = decomposition.levels.rbegin();
       it != decomposition.levels.rend(); ++it) {
    const DecompositionLevel& level = *it;
    const std::size_t bx = current.width() / 2;
    const std::size_t by = current.height() / 2;
    if (current.width() % 2 != 0 || current.height() % 2 != 0 || bx == 0 ||
        by == 0) {
      throw InvalidInput("tetrolet: low-pass plane has odd or zero size");
    }
    if (level.coverings.blocks_x != bx || level.coverings.blocks_y != by ||
        level.coverings.indices.size() != bx * by) {
      throw InvalidInput("tetrolet: missing or mismatched covering map");
    }
    for (const ImagePlane& d : level.details) {
      if (d.width() != current.width() || d.height() != current.height()) {
        throw InvalidInput("tetrolet: subband size does not match low-pass");
      }
    }

    ImagePlane restored(4 * bx, 4 * by);
    for (std::size_t bi = 0; bi < by; ++bi) {
      for (std::size_t bj = 0; bj < bx; ++bj) {
        const std::size_t index = level.coverings.at(bi, bj);
        if (index >= dictionary.size()) {
          throw InvalidInput(
              fmt::format("tetrolet: covering index {} out of range", index));
        }
        BlockCoefficients c;
        c.covering_index = static_cast<int>(index);
        for (int s = 0; s < 4; ++s) {
          const std::size_t row = 2 * bi + TileRow(s);
          const std::size_t col = 2 * bj + TileCol(s);
          c.lowpass[s] = current.at(row, col);
          for (int l = 0; l < 3; ++l) c.details[l][s] = level.details[l].at(row, col);
        }
        const Block block = InverseBlock(c, dictionary[index]);
        for (int i = 0; i < kBoardSize; ++i) {
          for (int j = 0; j < kBoardSize; ++j) {
            restored.at(4 * bi + i, 4 * bj + j) = block[i * kBoardSize + j];
          }
        }
      }
    }
    current = std::move(restored);
  }
  return current;
}

void WriteDecompositionDump(const TetroletDecomposition& decomposition,
                            const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string());
  for (std::size_t r = 0; r < decomposition.levels.size(); ++r) {
    const DecompositionLevel& level = decomposition.levels[r];
    for (int l = 0; l < kNumOrientations; ++l) {
      WritePlane(directory / fmt::format("level{}_w{}.txt", r + 1, l + 1),
                 level.details[l]);
    }
    const CoveringMap& map = level.coverings;
    WriteMatrix(directory / fmt::format("level{}_coverings.txt", r + 1),
                map.blocks_y, map.blocks_x, [&](std::size_t i, std::size_t j) {
                  return std::to_string(map.at(i, j));
                });
  }
  WritePlane(directory / "lowpass.txt", decomposition.lowpass);
}

}  // namespace tetiqa
