// Row-major 2D pixel grid.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "relight/vec.h"

namespace relight {

template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, const T& value = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0)
      throw std::invalid_argument("image: negative dimensions");
    pixels_.assign(static_cast<size_t>(width) * height, value);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  T& operator()(int x, int y) { return pixels_[index(x, y)]; }
  const T& operator()(int x, int y) const { return pixels_[index(x, y)]; }
  T& operator[](size_t i) { return pixels_[i]; }
  const T& operator[](size_t i) const { return pixels_[i]; }

  std::vector<T>& pixels() { return pixels_; }
  const std::vector<T>& pixels() const { return pixels_; }

  template <typename U>
  bool same_shape(const Image<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.pixels_ == b.pixels_;
  }

 private:
  size_t index(int x, int y) const {
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> pixels_;
};

using RgbImage = Image<Rgb>;
using ScalarImage = Image<double>;
using NormalImage = Image<vec3>;
using MaskImage = Image<uint8_t>;

template <typename A, typename B>
void require_same_shape(const Image<A>& a, const Image<B>& b,
                        const std::string& what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(
        what + ": resolution mismatch (" + std::to_string(a.width()) + "x" +
        std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
        std::to_string(b.height()) + ")");
}

}  // namespace relight
