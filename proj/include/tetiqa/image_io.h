#ifndef TETIQA_IMAGE_IO_H_
#define TETIQA_IMAGE_IO_H_

#include <cstddef>
#include <filesystem>

#include "tetiqa/image.h"

namespace tetiqa {

// BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

// Loads a raster as a luminance plane scaled to [0, 255]. Netpbm files
// (P2/P3/P5/P6, 8 or 16 bit) are decoded natively; other formats go through
// OpenCV when the library was built with it. Throws IoError with the path.
ImagePlane LoadGrayscale(const std::filesystem::path& path);

// Writes an 8-bit binary graymap; samples are rounded and clamped to
// [0, 255].
void WritePgm(const ImagePlane& plane, const std::filesystem::path& path);

struct CropResult {
  ImagePlane plane;
  std::size_t offset_x = 0;
  std::size_t offset_y = 0;
};

// Center crop to the largest dimensions divisible by 4 * 2^(levels - 1).
// Throws InvalidInput ("image too small") if either side is below that.
CropResult CropToTransformSize(const ImagePlane& plane, int levels);

}  // namespace tetiqa

#endif  // TETIQA_IMAGE_IO_H_
