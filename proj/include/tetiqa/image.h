#ifndef TETIQA_IMAGE_H_
#define TETIQA_IMAGE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace tetiqa {

// Single-channel plane of real samples, stored row-major.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t width, std::size_t height, double fill = 0.0)
      : width_(width), height_(height), samples_(width * height, fill) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  double& at(std::size_t row, std::size_t col) {
    return samples_[row * width_ + col];
  }
  double at(std::size_t row, std::size_t col) const {
    return samples_[row * width_ + col];
  }

  std::span<double> Row(std::size_t row) {
    return {samples_.data() + row * width_, width_};
  }
  std::span<const double> Row(std::size_t row) const {
    return {samples_.data() + row * width_, width_};
  }

  std::span<double> samples() { return samples_; }
  std::span<const double> samples() const { return samples_; }

  bool operator==(const ImagePlane&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> samples_;
};

}  // namespace tetiqa

#endif  // TETIQA_IMAGE_H_
