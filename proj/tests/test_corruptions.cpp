#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "specrob/corruptions.hpp"

namespace specrob {
namespace {

CorruptionSpec make(CorruptionKind kind, double param, std::uint64_t seed = 0) {
  CorruptionSpec s;
  s.kind = kind;
  s.param = param;
  s.seed = seed;
  return s;
}

TEST(Corruptions, GaussianNoiseStd) {
  const ImageTensor zero({1, 1024, 1024}, 0.0);
  const ImageTensor out = apply_corruption(zero, make(CorruptionKind::gaussian_noise, 0.3, 5));
  double mean = 0, ss = 0;
  for (double v : out.values()) mean += v;
  mean /= double(out.size());
  for (double v : out.values()) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(std::sqrt(ss / double(out.size() - 1)), 0.3, 0.3 * 0.02);
  EXPECT_NEAR(mean, 0.0, 0.02);
}

TEST(Corruptions, SeededAndReproducible) {
  std::mt19937_64 rng(1);
  const ImageTensor img = oracle::random_image({2, 8, 8}, rng);
  for (auto kind : {CorruptionKind::gaussian_noise, CorruptionKind::impulse_noise}) {
    const auto a = apply_corruption(img, make(kind, 0.2, 9));
    const auto b = apply_corruption(img, make(kind, 0.2, 9));
    const auto c = apply_corruption(img, make(kind, 0.2, 10));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
  }
}

TEST(Corruptions, BrightnessAndContrast) {
  std::mt19937_64 rng(2);
  const ImageTensor img = oracle::random_image({2, 6, 6}, rng);
  const auto bright = apply_corruption(img, make(CorruptionKind::brightness, 0.25));
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_DOUBLE_EQ(bright.values()[i], img.values()[i] + 0.25);
  const auto flat = apply_corruption(img, make(CorruptionKind::contrast, 0.0));
  for (std::size_t ch = 0; ch < 2; ++ch) {
    double mean = 0;
    for (double v : img.plane(ch)) mean += v;
    mean /= 36.0;
    for (double v : flat.plane(ch)) EXPECT_NEAR(v, mean, 1e-12);
  }
  const auto same = apply_corruption(img, make(CorruptionKind::contrast, 1.0));
  EXPECT_LT(max_abs_diff(same, img), 1e-12);
  EXPECT_EQ(apply_corruption(img, make(CorruptionKind::brightness, 0.0)), img);
}

TEST(Corruptions, BrightnessAndContrastCommuteInClosedForm) {
  std::mt19937_64 rng(12);
  const ImageTensor img = oracle::random_image({2, 5, 4}, rng);
  const double d = 0.7, s = 1.8;
  const auto bc = apply_corruption(apply_corruption(img, make(CorruptionKind::brightness, d)),
                                   make(CorruptionKind::contrast, s));
  const auto cb = apply_corruption(apply_corruption(img, make(CorruptionKind::contrast, s)),
                                   make(CorruptionKind::brightness, d));
  // Contrast pivots on the channel mean, which brightness shifts by d, so both
  // orders give mean + d + s (x - mean).
  EXPECT_LT(max_abs_diff(bc, cb), 1e-12);
  for (std::size_t ch = 0; ch < 2; ++ch) {
    double mean = 0;
    for (double v : img.plane(ch)) mean += v;
    mean /= 20.0;
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(bc.plane(ch)[i], mean + d + s * (img.plane(ch)[i] - mean), 1e-12);
  }
}

TEST(Corruptions, ImpulseNoiseRateAndValues) {
  std::mt19937_64 rng(3);
  const ImageTensor img = oracle::random_image({1, 100, 100}, rng);
  CorruptionSpec spec = make(CorruptionKind::impulse_noise, 0.1, 4);
  spec.impulse_low = -7.0;
  spec.impulse_high = 7.0;
  const auto out = apply_corruption(img, spec);
  std::size_t low = 0, high = 0, same = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = out.values()[i];
    if (v == -7.0) ++low;
    else if (v == 7.0) ++high;
    else if (v == img.values()[i]) ++same;
  }
  EXPECT_EQ(low + high + same, img.size());
  EXPECT_NEAR(double(low + high) / img.size(), 0.1, 0.01);
  EXPECT_NEAR(double(low) / double(low + high), 0.5, 0.05);
  // Without explicit values the image's own range is used.
  const auto own = apply_corruption(img, make(CorruptionKind::impulse_noise, 1.0, 4));
  const auto [lo, hi] = std::minmax_element(img.values().begin(), img.values().end());
  for (double v : own.values()) EXPECT_TRUE(v == *lo || v == *hi);
}

TEST(Corruptions, PixelateBlockMeans) {
  ImageTensor img({1, 4, 4});
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) img(0, r, c) = double(r * 4 + c);
  const auto out = apply_corruption(img, make(CorruptionKind::pixelate, 2));
  // Top-left block {0, 1, 4, 5}, bottom-right block {10, 11, 14, 15}.
  EXPECT_DOUBLE_EQ(out(0, 0, 0), 2.5);
  EXPECT_DOUBLE_EQ(out(0, 1, 1), 2.5);
  EXPECT_DOUBLE_EQ(out(0, 0, 2), 4.5);
  EXPECT_DOUBLE_EQ(out(0, 3, 3), 12.5);
  EXPECT_EQ(apply_corruption(img, make(CorruptionKind::pixelate, 1)), img);
  std::mt19937_64 rng(13);
  const ImageTensor big = oracle::random_image({1, 32, 32}, rng);
  const auto px = apply_corruption(big, make(CorruptionKind::pixelate, 4));
  for (std::size_t br = 0; br < 32; br += 4) {
    for (std::size_t bc = 0; bc < 32; bc += 4) {
      double mean = 0;
      for (std::size_t r = br; r < br + 4; ++r)
        for (std::size_t c = bc; c < bc + 4; ++c) mean += big(0, r, c) / 16.0;
      for (std::size_t r = br; r < br + 4; ++r)
        for (std::size_t c = bc; c < bc + 4; ++c) EXPECT_NEAR(px(0, r, c), mean, 1e-12);
    }
  }
  EXPECT_THROW(apply_corruption(img, make(CorruptionKind::pixelate, 3)), InvalidInput);
  EXPECT_THROW(apply_corruption(img, make(CorruptionKind::pixelate, 1.5)), InvalidInput);
}

TEST(Corruptions, BlurPreservesMeanAndSmooths) {
  std::mt19937_64 rng(5);
  const ImageTensor img = oracle::random_image({3, 32, 32}, rng);
  for (double sigma : {0.5, 1.0, 2.5, 6.0}) {
    const auto out = apply_corruption(img, make(CorruptionKind::gaussian_blur, sigma));
    for (std::size_t ch = 0; ch < 3; ++ch) {
      double a = 0, b = 0, va = 0, vb = 0;
      for (double v : img.plane(ch)) a += v;
      for (double v : out.plane(ch)) b += v;
      EXPECT_NEAR(a / 1024, b / 1024, 1e-5);
      for (double v : img.plane(ch)) va += v * v;
      for (double v : out.plane(ch)) vb += v * v;
      EXPECT_LT(vb, va);
    }
  }
  const ImageTensor flat({1, 9, 7}, 0.4);
  EXPECT_LT(max_abs_diff(apply_corruption(flat, make(CorruptionKind::gaussian_blur, 2.0)), flat), 1e-12);
}

TEST(Corruptions, BlurMatchesDirect2dConvolution) {
  std::mt19937_64 rng(6);
  const ImageTensor img = oracle::random_image({1, 7, 9}, rng);
  const double sigma = 1.3;
  const auto out = apply_corruption(img, make(CorruptionKind::gaussian_blur, sigma));
  const long rad = static_cast<long>(std::ceil(3 * sigma));
  auto refl = [](long i, long n) {
    while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
    return static_cast<std::size_t>(i);
  };
  for (long r = 0; r < 7; ++r) {
    for (long c = 0; c < 9; ++c) {
      double acc = 0, norm = 0;
      for (long dr = -rad; dr <= rad; ++dr) {
        for (long dc = -rad; dc <= rad; ++dc) {
          const double k = std::exp(-(dr * dr + dc * dc) / (2 * sigma * sigma));
          acc += k * img(0, refl(r + dr, 7), refl(c + dc, 9));
          norm += k;
        }
      }
      EXPECT_NEAR(out(0, r, c), acc / norm, 1e-12);
    }
  }
}

TEST(Corruptions, RejectsBadParameters) {
  const ImageTensor img({1, 4, 4});
  EXPECT_THROW(apply_corruption(img, make(CorruptionKind::gaussian_noise, -1)), InvalidInput);
  EXPECT_THROW(apply_corruption(img, make(CorruptionKind::impulse_noise, 1.5)), InvalidInput);
  EXPECT_THROW(apply_corruption(img, make(CorruptionKind::gaussian_blur, 0)), InvalidInput);
  EXPECT_THROW(apply_corruption(img, make(CorruptionKind::brightness, std::nan(""))), InvalidInput);
  EXPECT_THROW(parse_corruption_kind("fog"), InvalidInput);
  EXPECT_EQ(parse_corruption_kind("pixelate"), CorruptionKind::pixelate);
}

}  // namespace
}  // namespace specrob
