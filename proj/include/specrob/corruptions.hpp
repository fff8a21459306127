#pragma once

// Synthetic stand-ins for common image corruptions. Outputs are not clamped;
// inputs are normalized real-valued images.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/rng.hpp"
#include "specrob/tensor.hpp"

namespace specrob {

enum class CorruptionKind {
  brightness,
  contrast,
  gaussian_noise,
  impulse_noise,
  gaussian_blur,
  pixelate
};

inline const char* to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::brightness: return "brightness";
    case CorruptionKind::contrast: return "contrast";
    case CorruptionKind::gaussian_noise: return "gaussian_noise";
    case CorruptionKind::impulse_noise: return "impulse_noise";
    case CorruptionKind::gaussian_blur: return "gaussian_blur";
    case CorruptionKind::pixelate: return "pixelate";
  }
  return "?";
}

inline CorruptionKind parse_corruption_kind(const std::string& s) {
  for (auto k : {CorruptionKind::brightness, CorruptionKind::contrast,
                 CorruptionKind::gaussian_noise, CorruptionKind::impulse_noise,
                 CorruptionKind::gaussian_blur, CorruptionKind::pixelate}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidInput("unknown corruption kind '" + s + "'");
}

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::brightness;
  // Brightness offset, contrast scale, noise std, flip probability, blur
  // kernel std, or pixelation block factor.
  double param = 0.0;
  std::uint64_t seed = 0;
  // Replacement values for impulse noise; default to the image's own range.
  std::optional<double> impulse_low;
  std::optional<double> impulse_high;
};

namespace detail {

// Half-sample symmetric extension (edge pixel repeated), valid for any
// offset.
inline std::size_t reflect_index(long i, std::size_t n) {
  const long period = 2 * static_cast<long>(n);
  long m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<long>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

inline std::vector<double> gaussian_kernel(double sigma) {
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

inline ImageTensor gaussian_blur(const ImageTensor& x, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const long radius = static_cast<long>(kernel.size() / 2);
  const auto& s = x.shape();
  ImageTensor tmp(s), out(s);
  // The 2D normalized Gaussian is separable: rows, then columns.
  for (std::size_t ch = 0; ch < s.channels; ++ch) {
    for (std::size_t r = 0; r < s.height; ++r) {
      for (std::size_t c = 0; c < s.width; ++c) {
        double acc = 0.0;
        for (long k = -radius; k <= radius; ++k) {
          acc += kernel[static_cast<std::size_t>(k + radius)] *
                 x(ch, r, reflect_index(static_cast<long>(c) + k, s.width));
        }
        tmp(ch, r, c) = acc;
      }
    }
    for (std::size_t r = 0; r < s.height; ++r) {
      for (std::size_t c = 0; c < s.width; ++c) {
        double acc = 0.0;
        for (long k = -radius; k <= radius; ++k) {
          acc += kernel[static_cast<std::size_t>(k + radius)] *
                 tmp(ch, reflect_index(static_cast<long>(r) + k, s.height), c);
        }
        out(ch, r, c) = acc;
      }
    }
  }
  return out;
}

inline ImageTensor pixelate(const ImageTensor& x, std::size_t factor) {
  const auto& s = x.shape();
  ImageTensor out(s);
  const double area = static_cast<double>(factor * factor);
  for (std::size_t ch = 0; ch < s.channels; ++ch) {
    for (std::size_t br = 0; br < s.height; br += factor) {
      for (std::size_t bc = 0; bc < s.width; bc += factor) {
        double sum = 0.0;
        for (std::size_t r = br; r < br + factor; ++r) {
          for (std::size_t c = bc; c < bc + factor; ++c) sum += x(ch, r, c);
        }
        const double mean = sum / area;
        for (std::size_t r = br; r < br + factor; ++r) {
          for (std::size_t c = bc; c < bc + factor; ++c) out(ch, r, c) = mean;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

inline void validate(const CorruptionSpec& spec, const Shape3& shape) {
  const double p = spec.param;
  require(std::isfinite(p), "corruption parameter must be finite");
  switch (spec.kind) {
    case CorruptionKind::brightness:
    case CorruptionKind::contrast:
      break;
    case CorruptionKind::gaussian_noise:
      require(p >= 0.0, "gaussian_noise: sigma must be >= 0");
      break;
    case CorruptionKind::impulse_noise:
      require(p >= 0.0 && p <= 1.0, "impulse_noise: flip probability must be in [0, 1]");
      break;
    case CorruptionKind::gaussian_blur:
      require(p > 0.0, "gaussian_blur: kernel sigma must be > 0");
      break;
    case CorruptionKind::pixelate: {
      require(p >= 1.0 && p == std::floor(p), "pixelate: block factor must be an integer >= 1");
      const auto f = static_cast<std::size_t>(p);
      require(shape.height % f == 0 && shape.width % f == 0,
              "pixelate: block factor must divide height and width");
      break;
    }
  }
}

inline ImageTensor apply_corruption(const ImageTensor& image,
                                    const CorruptionSpec& spec) {
  validate(image, "corruption input");
  validate(spec, image.shape());
  const auto& s = image.shape();
  ImageTensor out = image;
  auto& v = out.values();
  switch (spec.kind) {
    case CorruptionKind::brightness:
      for (auto& x : v) x += spec.param;
      break;
    case CorruptionKind::contrast:
      for (std::size_t ch = 0; ch < s.channels; ++ch) {
        auto plane = out.plane(ch);
        double mean = 0.0;
        for (double x : plane) mean += x;
        mean /= static_cast<double>(plane.size());
        for (auto& x : plane) x = mean + spec.param * (x - mean);
      }
      break;
    case CorruptionKind::gaussian_noise: {
      Rng rng = make_rng(spec.seed);
      std::normal_distribution<double> noise(0.0, spec.param);
      for (auto& x : v) x += noise(rng);
      break;
    }
    case CorruptionKind::impulse_noise: {
      const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
      const double lo = spec.impulse_low.value_or(*lo_it);
      const double hi = spec.impulse_high.value_or(*hi_it);
      Rng rng = make_rng(spec.seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& x : v) {
        const double flip = u(rng);
        const double side = u(rng);
        if (flip < spec.param) x = side < 0.5 ? lo : hi;
      }
      break;
    }
    case CorruptionKind::gaussian_blur:
      out = detail::gaussian_blur(image, spec.param);
      break;
    case CorruptionKind::pixelate:
      out = detail::pixelate(image, static_cast<std::size_t>(spec.param));
      break;
  }
  return out;
}

}  // namespace specrob
