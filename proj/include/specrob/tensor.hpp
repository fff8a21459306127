#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specrob/error.hpp"

namespace specrob {

struct Shape3 {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t plane_size() const { return height * width; }
  std::size_t size() const { return channels * height * width; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

inline std::string to_string(const Shape3& s) {
  return "(" + std::to_string(s.channels) + "," + std::to_string(s.height) +
         "," + std::to_string(s.width) + ")";
}

// Dense channel-major (C, H, W) array. Channel planes are contiguous and
// each plane is row-major.
template <typename T>
class Array3 {
 public:
  using value_type = T;

  Array3() = default;
  explicit Array3(Shape3 shape, T fill = T{})
      : shape_(shape), data_(shape.size(), fill) {}
  Array3(Shape3 shape, std::vector<T> data)
      : shape_(shape), data_(std::move(data)) {
    require(data_.size() == shape_.size(),
            "array data length does not match shape " + to_string(shape_));
  }

  const Shape3& shape() const { return shape_; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t c, std::size_t r, std::size_t col) {
    return data_[(c * shape_.height + r) * shape_.width + col];
  }
  const T& operator()(std::size_t c, std::size_t r, std::size_t col) const {
    return data_[(c * shape_.height + r) * shape_.width + col];
  }

  std::span<T> plane(std::size_t c) {
    return {data_.data() + c * shape_.plane_size(), shape_.plane_size()};
  }
  std::span<const T> plane(std::size_t c) const {
    return {data_.data() + c * shape_.plane_size(), shape_.plane_size()};
  }

  std::vector<T>& values() & { return data_; }
  const std::vector<T>& values() const& { return data_; }
  std::vector<T> values() && { return std::move(data_); }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  Shape3 shape_{};
  std::vector<T> data_;
};

// Real image in normalized-pixel units; values may be negative.
using ImageTensor = Array3<double>;
// Unnormalized 2D DFT coefficients, one plane per image channel.
using Spectrum = Array3<std::complex<double>>;

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <typename T>
void validate(const Array3<T>& a, const char* what) {
  const auto& s = a.shape();
  require(s.channels >= 1 && s.height >= 2 && s.width >= 2,
          std::string(what) + " must have C >= 1, H >= 2, W >= 2; got " +
              to_string(s));
  for (const auto& v : a.values()) {
    if (!is_finite(v)) {
      throw InvalidInput(std::string(what) + " contains non-finite values");
    }
  }
}

template <typename T>
void require_same_shape(const Array3<T>& a, const Array3<T>& b,
                        const char* what) {
  if (a.shape() != b.shape()) {
    throw InvalidInput(std::string(what) + ": shape mismatch " +
                       to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
}

inline double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

}  // namespace specrob
