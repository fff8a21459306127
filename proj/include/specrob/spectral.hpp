#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/fft.hpp"
#include "specrob/tensor.hpp"

namespace specrob {

/// Per-channel amplitude and phase of a spectrum. Phase lies in (-pi, pi];
/// bins with zero amplitude carry phase 0.
struct FourierDecomposition {
  Array3<double> amplitude;
  Array3<double> phase;
};

/// Low-frequency selection over the (H, W) DFT grid.
struct RadialMask {
  std::size_t height = 0;
  std::size_t width = 0;
  double cutoff = 0.0;
  std::vector<std::uint8_t> included;  // row-major, 1 = inside the cutoff

  bool contains(std::size_t r, std::size_t c) const {
    return included[r * width + c] != 0;
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : included) n += v;
    return n;
  }
};

/// Power per DFT bin, stored unshifted (DC at index (0, 0)). Values are
/// signed when the map is a difference of two PSDs.
struct PsdMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> power;
  std::size_t source_count = 0;

  double at(std::size_t r, std::size_t c) const { return power[r * width + c]; }
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, two_pi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

/// Signed frequency of DFT index i on an axis of length n:
/// {0, 1, ..., floor(n/2), -ceil(n/2)+1, ..., -1}.
inline long signed_frequency(std::size_t i, std::size_t n) {
  return i <= n / 2 ? static_cast<long>(i)
                    : static_cast<long>(i) - static_cast<long>(n);
}

/// Normalized radius of bin (r, c) on an h x w grid: 0 at DC, 1 at the
/// (Nyquist, Nyquist) corner for even sizes.
inline double normalized_radius(std::size_t r, std::size_t c, std::size_t h,
                                std::size_t w) {
  const double u = 2.0 * static_cast<double>(signed_frequency(r, h)) /
                   static_cast<double>(h);
  const double v = 2.0 * static_cast<double>(signed_frequency(c, w)) /
                   static_cast<double>(w);
  return std::sqrt(u * u + v * v) / std::numbers::sqrt2;
}

inline Spectrum dft2(const ImageTensor& image) {
  validate(image, "dft2 input");
  const auto& s = image.shape();
  Spectrum out(s);
  for (std::size_t ch = 0; ch < s.channels; ++ch) {
    auto src = image.plane(ch);
    auto dst = out.plane(ch);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
    fft::transform_2d(dst, s.height, s.width, false);
  }
  return out;
}

/// Inverse 2D DFT per channel; the imaginary residue is discarded.
inline ImageTensor idft2_real(const Spectrum& spectrum) {
  validate(spectrum, "idft2_real input");
  const auto& s = spectrum.shape();
  ImageTensor out(s);
  std::vector<std::complex<double>> work(s.plane_size());
  const double scale = 1.0 / static_cast<double>(s.plane_size());
  for (std::size_t ch = 0; ch < s.channels; ++ch) {
    auto src = spectrum.plane(ch);
    std::copy(src.begin(), src.end(), work.begin());
    fft::transform_2d(work, s.height, s.width, true);
    auto dst = out.plane(ch);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = work[i].real() * scale;
  }
  return out;
}

inline FourierDecomposition decompose(const Spectrum& spectrum) {
  validate(spectrum, "decompose input");
  FourierDecomposition d{Array3<double>(spectrum.shape()),
                         Array3<double>(spectrum.shape())};
  const auto& in = spectrum.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double a = std::abs(in[i]);
    d.amplitude.values()[i] = a;
    d.phase.values()[i] = a == 0.0 ? 0.0 : wrap_angle(std::arg(in[i]));
  }
  return d;
}

inline Spectrum recompose(const FourierDecomposition& d) {
  require_same_shape(d.amplitude, d.phase, "recompose");
  Spectrum out(d.amplitude.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = d.amplitude.values()[i];
    const double p = d.phase.values()[i];
    require(std::isfinite(a) && std::isfinite(p),
            "recompose: non-finite amplitude or phase");
    require(a >= 0.0, "recompose: negative amplitude");
    out.values()[i] = std::polar(a, p);
  }
  return out;
}

inline RadialMask radial_mask(std::size_t h, std::size_t w, double rho) {
  require(h >= 2 && w >= 2, "radial_mask: grid must be at least 2x2");
  require(rho >= 0.0 && rho <= 1.0, "radial_mask: cutoff must lie in [0, 1]");
  RadialMask m{h, w, rho, std::vector<std::uint8_t>(h * w, 0)};
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      // rho = 1 must include the corner bin exactly despite rounding in sqrt.
      const bool inside = rho >= 1.0 || normalized_radius(r, c, h, w) <= rho;
      m.included[r * w + c] = inside ? 1 : 0;
    }
  }
  return m;
}

/// Mean over images and channels of |X[u,v]|^2 / (H*W).
inline PsdMap psd(std::span<const ImageTensor> images) {
  require(!images.empty(), "psd: no images");
  const Shape3 shape = images.front().shape();
  PsdMap out{shape.height, shape.width,
             std::vector<double>(shape.plane_size(), 0.0), images.size()};
  const double norm = static_cast<double>(shape.plane_size());
  std::vector<double> per_image(shape.plane_size());
  std::size_t seen = 0;
  for (const auto& img : images) {
    if (img.shape() != shape) {
      throw InvalidInput("psd: shape mismatch " + to_string(img.shape()) +
                         " vs " + to_string(shape));
    }
    const Spectrum spec = dft2(img);
    std::fill(per_image.begin(), per_image.end(), 0.0);
    for (std::size_t ch = 0; ch < shape.channels; ++ch) {
      auto plane = spec.plane(ch);
      for (std::size_t i = 0; i < plane.size(); ++i) {
        per_image[i] += std::norm(plane[i]) / norm;
      }
    }
    // Running mean keeps the result of N identical inputs bit-equal to one.
    ++seen;
    for (std::size_t i = 0; i < per_image.size(); ++i) {
      const double v = per_image[i] / static_cast<double>(shape.channels);
      out.power[i] += (v - out.power[i]) / static_cast<double>(seen);
    }
  }
  return out;
}

}  // namespace specrob
