#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "specrob/spectral.hpp"

namespace specrob {
namespace {

double max_abs_diff(const Spectrum& a, const Spectrum& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

TEST(Dft2, ConstantImageIsDcOnly) {
  const double c = 0.7;
  const Spectrum s = dft2(ImageTensor({1, 4, 4}, c));
  EXPECT_NEAR(s(0, 0, 0).real(), 16 * c, 1e-6);
  EXPECT_NEAR(s(0, 0, 0).imag(), 0.0, 1e-6);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_NEAR(std::abs(s.values()[i]), 0.0, 1e-6);
}

TEST(Dft2, ImpulseHasFlatSpectrum) {
  ImageTensor img({1, 6, 5}, 0.0);
  img(0, 2, 3) = 1.0;
  for (const auto& v : dft2(img).values()) EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
}

TEST(Dft2, MatchesNaiveOracle) {
  std::mt19937_64 rng(11);
  for (Shape3 shape : {Shape3{3, 8, 8}, Shape3{2, 6, 10}, Shape3{1, 7, 5}}) {
    const ImageTensor img = oracle::random_image(shape, rng);
    EXPECT_LT(max_abs_diff(dft2(img), oracle::naive_dft2(img)), 1e-6) << to_string(shape);
  }
}

TEST(Dft2, RejectsNonFiniteInput) {
  ImageTensor img({1, 4, 4}, 0.0);
  img(0, 1, 1) = std::nan("");
  EXPECT_THROW(dft2(img), InvalidInput);
  EXPECT_THROW(dft2(ImageTensor({1, 1, 4}, 0.0)), InvalidInput);
}

TEST(Idft2Real, RoundTrip) {
  std::mt19937_64 rng(12);
  for (Shape3 shape : {Shape3{3, 32, 32}, Shape3{3, 12, 20}}) {
    const ImageTensor img = oracle::random_image(shape, rng);
    EXPECT_LT(max_abs_diff(idft2_real(dft2(img)), img), 1e-5);
  }
}

TEST(Idft2Real, DcOnlySpectrumGivesOnes) {
  Spectrum s({1, 4, 6});
  s(0, 0, 0) = 24.0;
  for (double v : idft2_real(s).values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Idft2Real, NonHermitianSpectrumKeepsRealPart) {
  std::mt19937_64 rng(13);
  const ImageTensor img = oracle::random_image({2, 8, 6}, rng);
  Spectrum s = dft2(img);
  s(0, 1, 2) += std::complex<double>(3.0, -2.0);
  s(1, 5, 0) *= std::complex<double>(0.0, 1.5);
  const ImageTensor got = idft2_real(s);
  const ImageTensor want = oracle::naive_idft2_real(s);
  EXPECT_LT(max_abs_diff(got, want), 1e-9);
  EXPECT_GT(max_abs_diff(got, img), 1e-3);
}

TEST(Decompose, ModulusAndArgument) {
  Spectrum s({1, 2, 2});
  s(0, 0, 0) = {3.0, 4.0};
  s(0, 1, 1) = {-1.0, -0.0};
  const auto d = decompose(s);
  EXPECT_DOUBLE_EQ(d.amplitude(0, 0, 0), 5.0);
  EXPECT_NEAR(d.phase(0, 0, 0), std::atan2(4.0, 3.0), 1e-15);
  EXPECT_NEAR(d.phase(0, 0, 0), 0.9273, 1e-4);
  EXPECT_EQ(d.amplitude(0, 0, 1), 0.0);
  EXPECT_EQ(d.phase(0, 0, 1), 0.0);
  // Negative real axis maps to +pi, never -pi.
  EXPECT_DOUBLE_EQ(d.phase(0, 1, 1), std::numbers::pi);
}

TEST(Recompose, PolarForm) {
  FourierDecomposition d{Array3<double>({1, 2, 2}, 0.0), Array3<double>({1, 2, 2}, 0.0)};
  d.amplitude(0, 0, 0) = 2.0;
  d.phase(0, 0, 0) = std::numbers::pi / 2;
  d.phase(0, 0, 1) = 1.234;
  const Spectrum s = recompose(d);
  EXPECT_NEAR(s(0, 0, 0).real(), 0.0, 1e-9);
  EXPECT_NEAR(s(0, 0, 0).imag(), 2.0, 1e-9);
  EXPECT_EQ(s(0, 0, 1), std::complex<double>(0.0, 0.0));
  d.amplitude(0, 1, 1) = -1.0;
  EXPECT_THROW(recompose(d), InvalidInput);
}

TEST(Decompose, RoundTripsThroughRecompose) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(0, 5);
  Spectrum s({3, 9, 7});
  for (auto& v : s.values()) v = {n(rng), n(rng)};
  s(1, 2, 2) = 0.0;
  EXPECT_LT(max_abs_diff(recompose(decompose(s)), s), 1e-6);
  const auto d = decompose(s);
  for (double p : d.phase.values()) {
    EXPECT_GT(p, -std::numbers::pi);
    EXPECT_LE(p, std::numbers::pi);
  }
}

TEST(RadialMask, Extremes) {
  const auto m0 = radial_mask(8, 8, 0.0);
  EXPECT_EQ(m0.count(), 1u);
  EXPECT_TRUE(m0.contains(0, 0));
  EXPECT_EQ(radial_mask(8, 8, 1.0).count(), 64u);
  EXPECT_EQ(radial_mask(7, 9, 1.0).count(), 63u);
  EXPECT_THROW(radial_mask(8, 8, 1.01), InvalidInput);
  EXPECT_THROW(radial_mask(8, 8, -0.1), InvalidInput);
}

TEST(RadialMask, CountMatchesEnumeration) {
  // Signed frequencies for n = 8 are {0, 1, 2, 3, 4, -3, -2, -1}.
  std::size_t expected = 0;
  for (int u = -3; u <= 4; ++u) {
    for (int v = -3; v <= 4; ++v) {
      const double r = std::sqrt(std::pow(2.0 * u / 8, 2) + std::pow(2.0 * v / 8, 2)) / std::sqrt(2.0);
      if (r <= 0.5) ++expected;
    }
  }
  EXPECT_EQ(radial_mask(8, 8, 0.5).count(), expected);
  EXPECT_EQ(expected, 25u);  // lattice points with u^2 + v^2 <= 8
}

TEST(RadialMask, MonotoneAndSymmetric) {
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {7, 10}, {32, 32}}) {
    for (double a = 0.0; a <= 1.0; a += 0.05) {
      const auto ma = radial_mask(h, w, a);
      const auto mb = radial_mask(h, w, std::min(1.0, a + 0.05));
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          if (ma.contains(r, c)) {
            EXPECT_TRUE(mb.contains(r, c));
          }
          EXPECT_EQ(ma.contains(r, c), ma.contains((h - r) % h, (w - c) % w));
        }
      }
    }
  }
}

TEST(Psd, ConstantImage) {
  const ImageTensor img({1, 4, 4}, 0.5);
  const PsdMap m = psd(std::vector<ImageTensor>{img});
  EXPECT_NEAR(m.at(0, 0), 0.25 * 16, 1e-12);
  for (std::size_t i = 1; i < m.power.size(); ++i) EXPECT_NEAR(m.power[i], 0.0, 1e-12);
  EXPECT_EQ(m.source_count, 1u);
}

TEST(Psd, CosineConcentratesInConjugateBins) {
  const std::size_t h = 16, w = 8;
  ImageTensor img({1, h, w});
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) img(0, r, c) = std::cos(2 * std::numbers::pi * 3 * r / h);
  const PsdMap m = psd(std::vector<ImageTensor>{img});
  // |X| = H W / 2 at (+-3, 0), so power = (H W / 2)^2 / (H W) = H W / 4.
  EXPECT_NEAR(m.at(3, 0), h * w / 4.0, 1e-9);
  EXPECT_NEAR(m.at(h - 3, 0), h * w / 4.0, 1e-9);
  double rest = 0;
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      if (!((r == 3 || r == h - 3) && c == 0)) rest += m.at(r, c);
  EXPECT_NEAR(rest, 0.0, 1e-9);
}

TEST(Psd, CopiesDoNotChangeTheMap) {
  std::mt19937_64 rng(15);
  const ImageTensor img = oracle::random_image({3, 8, 8}, rng);
  const PsdMap one = psd(std::vector<ImageTensor>{img});
  const PsdMap many = psd(std::vector<ImageTensor>(7, img));
  EXPECT_EQ(one.power, many.power);
  EXPECT_EQ(many.source_count, 7u);
}

TEST(Psd, WhiteNoiseIsFlat) {
  std::mt19937_64 rng(16);
  std::vector<ImageTensor> images;
  for (int i = 0; i < 10000; ++i) images.push_back(oracle::random_image({1, 32, 32}, rng));
  const PsdMap m = psd(images);
  for (double p : m.power) EXPECT_NEAR(p, 1.0, 0.05);
}

TEST(Psd, RejectsBadInput) {
  EXPECT_THROW(psd(std::vector<ImageTensor>{}), InvalidInput);
  std::vector<ImageTensor> mixed{ImageTensor({1, 4, 4}), ImageTensor({1, 4, 6})};
  EXPECT_THROW(psd(mixed), InvalidInput);
}

// Property checks over random shapes, including non-power-of-two sizes.
TEST(SpectralProperties, ParsevalAndRoundTrip) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> dim(2, 24), ch(1, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const Shape3 shape{ch(rng), dim(rng), dim(rng)};
    const ImageTensor img = oracle::random_image(shape, rng, 3.0);
    const Spectrum s = dft2(img);
    for (std::size_t c = 0; c < shape.channels; ++c) {
      double energy = 0, spec_energy = 0;
      for (double v : img.plane(c)) energy += v * v;
      for (auto v : s.plane(c)) spec_energy += std::norm(v);
      EXPECT_NEAR(spec_energy, shape.plane_size() * energy, 1e-5 * shape.plane_size() * energy);
    }
    EXPECT_LT(max_abs_diff(idft2_real(s), img), 1e-5) << to_string(shape);
  }
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(-6.0), -6.0 + 2 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2 * std::numbers::pi, 1e-15);
}

}  // namespace
}  // namespace specrob
