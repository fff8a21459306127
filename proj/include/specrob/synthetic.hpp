#pragma once

// Synthetic image generators for desk-scale experiments.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "specrob/rng.hpp"
#include "specrob/spectral.hpp"
#include "specrob/tensor.hpp"

namespace specrob {

inline ImageTensor white_noise_image(Shape3 shape, double sigma, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  ImageTensor img(shape);
  for (auto& v : img.values()) v = normal(rng);
  return img;
}

/// Gaussian field with amplitude spectrum ~ 1/f (power ~ 1/f^2), scaled to
/// unit standard deviation per channel.
inline ImageTensor natural_image(Shape3 shape, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ImageTensor white(shape);
  for (auto& v : white.values()) v = normal(rng);
  Spectrum spec = dft2(white);
  for (std::size_t ch = 0; ch < shape.channels; ++ch) {
    for (std::size_t r = 0; r < shape.height; ++r) {
      for (std::size_t c = 0; c < shape.width; ++c) {
        const double u = static_cast<double>(signed_frequency(r, shape.height)) / static_cast<double>(shape.height);
        const double v = static_cast<double>(signed_frequency(c, shape.width)) / static_cast<double>(shape.width);
        const double f = std::sqrt(u * u + v * v);
        spec(ch, r, c) *= f > 0.0 ? 1.0 / f : 0.0;
      }
    }
  }
  ImageTensor img = idft2_real(spec);
  for (std::size_t ch = 0; ch < shape.channels; ++ch) {
    auto plane = img.plane(ch);
    double mean = 0.0, ss = 0.0;
    for (double x : plane) mean += x;
    mean /= static_cast<double>(plane.size());
    for (double x : plane) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(plane.size()));
    for (auto& x : plane) x = sd > 0.0 ? (x - mean) / sd : 0.0;
  }
  return img;
}

struct LabeledImages {
  std::vector<ImageTensor> images;
  std::vector<int> labels;
};

/// Two-class blob images: a bright Gaussian spot left of center (class 0)
/// or right of center (class 1) at a jittered position, plus white noise.
inline LabeledImages blob_dataset(std::size_t per_class, Shape3 shape, double noise_sigma, std::uint64_t seed) {
  LabeledImages out;
  const double h = static_cast<double>(shape.height), w = static_cast<double>(shape.width);
  const double spot = 0.12 * std::min(h, w);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int label = static_cast<int>(i % 2);
    Rng rng = make_rng(seed, {i});
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> jitter(-0.08, 0.08);
    const double cy = h * (0.5 + jitter(rng));
    const double cx = w * ((label == 0 ? 0.3 : 0.7) + jitter(rng));
    ImageTensor img(shape);
    for (std::size_t ch = 0; ch < shape.channels; ++ch) {
      for (std::size_t r = 0; r < shape.height; ++r) {
        for (std::size_t c = 0; c < shape.width; ++c) {
          const double dy = static_cast<double>(r) - cy, dx = static_cast<double>(c) - cx;
          img(ch, r, c) = 2.0 * std::exp(-(dx * dx + dy * dy) / (2.0 * spot * spot)) - 0.25 +
                          noise_sigma * normal(rng);
        }
      }
    }
    out.images.push_back(std::move(img));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace specrob
