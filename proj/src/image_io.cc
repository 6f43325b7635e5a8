#include "tetiqa/image_io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>

#ifdef TETIQA_HAVE_OPENCV
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#endif

#include "tetiqa/errors.h"

namespace tetiqa {
namespace {

double Luma(double r, double g, double b) {
  return kLumaR * r + kLumaG * g + kLumaB * b;
}

class PnmReader {
 public:
  PnmReader(std::vector<unsigned char> bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  ImagePlane Read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') Fail("not a netpbm file");
    const char kind = static_cast<char>(bytes_[1]);
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
      Fail(fmt::format("unsupported netpbm type P{}", kind));
    }
    pos_ = 2;
    const bool color = kind == '3' || kind == '6';
    const bool ascii = kind == '2' || kind == '3';
    const std::size_t width = NextNumber();
    const std::size_t height = NextNumber();
    const std::size_t maxval = NextNumber();
    if (width == 0 || height == 0) Fail("zero image dimension");
    if (maxval == 0 || maxval > 65535) Fail("maxval out of range");
    if (!ascii) {
      // Exactly one whitespace byte separates the header from the raster.
      if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
        Fail("malformed header");
      }
      ++pos_;
    }

    const double to_255 = 255.0 / static_cast<double>(maxval);
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const auto next_sample = [&]() -> double {
      if (ascii) return static_cast<double>(NextNumber());
      if (pos_ + sample_bytes > bytes_.size()) Fail("truncated raster");
      unsigned v = bytes_[pos_++];
      if (sample_bytes == 2) v = (v << 8) | bytes_[pos_++];
      return static_cast<double>(v);
    };

    ImagePlane plane(width, height);
    for (double& s : plane.samples()) {
      if (color) {
        const double r = next_sample();
        const double g = next_sample();
        const double b = next_sample();
        s = Luma(r, g, b) * to_255;
      } else {
        s = next_sample() * to_255;
      }
    }
    return plane;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw IoError(fmt::format("{}: {}", path_, what));
  }

  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t NextNumber() {
    SkipSpaceAndComments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      Fail("expected a number");
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1u << 30)) Fail("number out of range");
    }
    return value;
  }

  std::vector<unsigned char> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

#ifdef TETIQA_HAVE_OPENCV
ImagePlane LoadWithOpenCv(const std::filesystem::path& path) {
  const cv::Mat mat =
      cv::imread(path.string(), cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
  if (mat.empty()) throw IoError(path.string() + ": cannot decode image");
  double to_255 = 1.0;
  if (mat.depth() == CV_16U) {
    to_255 = 255.0 / 65535.0;
  } else if (mat.depth() != CV_8U) {
    throw IoError(path.string() + ": unsupported sample depth");
  }
  const int channels = mat.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw IoError(fmt::format("{}: unsupported channel count {}", path.string(),
                              channels));
  }
  ImagePlane plane(static_cast<std::size_t>(mat.cols),
                   static_cast<std::size_t>(mat.rows));
  for (int r = 0; r < mat.rows; ++r) {
    for (int c = 0; c < mat.cols; ++c) {
      const auto sample = [&](int ch) {
        return mat.depth() == CV_8U
                   ? static_cast<double>(mat.ptr<unsigned char>(r)[c * channels + ch])
                   : static_cast<double>(mat.ptr<unsigned short>(r)[c * channels + ch]);
      };
      // OpenCV stores color as BGR(A).
      const double v = channels == 1 ? sample(0) : Luma(sample(2), sample(1), sample(0));
      plane.at(r, c) = v * to_255;
    }
  }
  return plane;
}
#endif

}  // namespace

ImagePlane LoadGrayscale(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7') {
    return PnmReader(std::move(bytes), path.string()).Read();
  }
#ifdef TETIQA_HAVE_OPENCV
  return LoadWithOpenCv(path);
#else
  throw IoError(path.string() + ": unsupported image format (netpbm only)");
#endif
}

void WritePgm(const ImagePlane& plane, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << "P5\n" << plane.width() << ' ' << plane.height() << "\n255\n";
  std::vector<char> raster(plane.size());
  std::transform(plane.samples().begin(), plane.samples().end(), raster.begin(),
                 [](double v) {
                   return static_cast<char>(
                       static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0)));
                 });
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

CropResult CropToTransformSize(const ImagePlane& plane, int levels) {
  if (levels < 1) throw InvalidInput("crop: levels must be >= 1");
  const std::size_t multiple = std::size_t{4} << (levels - 1);
  if (plane.width() < multiple || plane.height() < multiple) {
    throw InvalidInput(fmt::format(
        "image too small: {}x{} is below the {}x{} minimum for {} level(s)",
        plane.width(), plane.height(), multiple, multiple, levels));
  }
  const std::size_t w = plane.width() / multiple * multiple;
  const std::size_t h = plane.height() / multiple * multiple;
  CropResult out;
  out.offset_x = (plane.width() - w) / 2;
  out.offset_y = (plane.height() - h) / 2;
  out.plane = ImagePlane(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    const auto src = plane.Row(r + out.offset_y).subspan(out.offset_x, w);
    std::copy(src.begin(), src.end(), out.plane.Row(r).begin());
  }
  return out;
}

}  // namespace tetiqa
