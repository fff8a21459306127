#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "specrob/corruptions.hpp"
#include "specrob/shift_psd.hpp"
#include "specrob/synthetic.hpp"

namespace specrob {
namespace {

double oracle_radius(std::size_t r, std::size_t c, std::size_t h, std::size_t w) {
  const double u = 2.0 * (r <= h / 2 ? double(r) : double(r) - double(h)) / double(h);
  const double v = 2.0 * (c <= w / 2 ? double(c) : double(c) - double(w)) / double(w);
  return std::sqrt((u * u + v * v) / 2.0);
}

std::vector<ImageTensor> noisy_copies(const std::vector<ImageTensor>& xs, double sigma, std::uint64_t seed) {
  std::vector<ImageTensor> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CorruptionSpec s;
    s.kind = CorruptionKind::gaussian_noise;
    s.param = sigma;
    s.seed = seed + i;
    out.push_back(apply_corruption(xs[i], s));
  }
  return out;
}

TEST(PairedShiftPsd, GaussianNoiseIsFlatAtVariance) {
  std::vector<ImageTensor> xs;
  for (std::uint64_t i = 0; i < 5000; ++i) xs.push_back(natural_image({1, 32, 32}, i));
  const PsdMap m = paired_shift_psd(xs, noisy_copies(xs, 0.3, 50000));
  for (double p : m.power) EXPECT_NEAR(p, 0.09, 0.009);
  const auto f = band_fractions(m);
  EXPECT_GT(f.high, f.mid);
  EXPECT_GT(f.mid, f.low);
}

TEST(PairedShiftPsd, IdenticalSetsGiveZeroAndAreRejectedByBands) {
  std::mt19937_64 rng(3);
  std::vector<ImageTensor> xs{oracle::random_image({1, 8, 8}, rng), oracle::random_image({1, 8, 8}, rng)};
  const PsdMap m = paired_shift_psd(xs, xs);
  for (double p : m.power) EXPECT_EQ(p, 0.0);
  EXPECT_THROW(band_fractions(m), UndefinedMetric);
}

TEST(PairedShiftPsd, BrightnessIsDcOnly) {
  std::vector<ImageTensor> xs;
  for (std::uint64_t i = 0; i < 20; ++i) xs.push_back(natural_image({2, 16, 16}, i));
  std::vector<ImageTensor> ys;
  CorruptionSpec s;
  s.kind = CorruptionKind::brightness;
  s.param = 0.5;
  for (const auto& x : xs) ys.push_back(apply_corruption(x, s));
  const PsdMap m = paired_shift_psd(xs, ys);
  // Difference image is the constant 0.5: |X(0,0)|^2 / HW = 0.25 HW.
  EXPECT_NEAR(m.at(0, 0), 0.25 * 256, 1e-9);
  for (std::size_t i = 1; i < m.power.size(); ++i) EXPECT_NEAR(m.power[i], 0.0, 1e-20);
  EXPECT_GT(band_fractions(m).low, 0.9);
}

TEST(PairedShiftPsd, TranslationConsistent) {
  std::mt19937_64 rng(31);
  std::vector<ImageTensor> a, b, a2, b2;
  for (int i = 0; i < 10; ++i) {
    a.push_back(oracle::random_image({1, 8, 8}, rng));
    b.push_back(oracle::random_image({1, 8, 8}, rng));
    a2.push_back(a.back());
    b2.push_back(b.back());
    for (auto& v : a2.back().values()) v += 3.0;
    for (auto& v : b2.back().values()) v += 3.0;
  }
  const PsdMap m = paired_shift_psd(a, b), m2 = paired_shift_psd(a2, b2);
  for (std::size_t i = 0; i < m.power.size(); ++i) EXPECT_NEAR(m.power[i], m2.power[i], 1e-10);
}

TEST(PairedShiftPsd, RejectsMismatch) {
  std::vector<ImageTensor> a{ImageTensor({1, 4, 4})}, b{ImageTensor({1, 4, 4}), ImageTensor({1, 4, 4})};
  EXPECT_THROW(paired_shift_psd(a, b), InvalidInput);
  std::vector<ImageTensor> c{ImageTensor({1, 4, 6})};
  EXPECT_THROW(paired_shift_psd(a, c), InvalidInput);
}

TEST(ClassAveragedShiftPsd, AddedWhiteNoiseGivesFlatVariance) {
  ClassGroups a, b;
  for (int k = 0; k < 2; ++k) {
    std::vector<ImageTensor> xs;
    for (std::uint64_t i = 0; i < 2000; ++i) xs.push_back(white_noise_image({1, 32, 32}, 0.2 + 0.1 * k, 9000 * k + i));
    b[k] = noisy_copies(xs, 0.2, 100000 + 9000 * k);
    a[k] = std::move(xs);
  }
  const PsdMap m = class_averaged_shift_psd(a, b);
  for (double p : m.power) EXPECT_NEAR(p, 0.04, 0.04 * 0.15);
}

TEST(ClassAveragedShiftPsd, IdenticalAndReshuffledGroupsGiveZero) {
  ClassGroups a;
  for (int k = 0; k < 3; ++k) {
    for (std::uint64_t i = 0; i < 40; ++i) a[k].push_back(natural_image({1, 16, 16}, 100 * k + i));
  }
  for (double p : class_averaged_shift_psd(a, a).power) EXPECT_EQ(p, 0.0);
  // A within-class reshuffle is the same multiset, so only summation-order
  // rounding remains. The null scale is the mean per-bin power.
  ClassGroups shuffled = a;
  std::mt19937_64 rng(2);
  for (auto& [k, g] : shuffled) std::shuffle(g.begin(), g.end(), rng);
  const PsdMap m = class_averaged_shift_psd(a, shuffled);
  const PsdMap base = psd(a[0]);
  const double scale = std::accumulate(base.power.begin(), base.power.end(), 0.0) / base.power.size();
  for (double p : m.power) EXPECT_LT(std::abs(p), 1e-12 * scale);
}

TEST(ClassAveragedShiftPsd, AdditiveNoiseRaisesPowerByVariance) {
  ClassGroups a, b;
  for (int k = 0; k < 4; ++k) {
    std::vector<ImageTensor> xs;
    for (std::uint64_t i = 0; i < 300; ++i) xs.push_back(natural_image({3, 16, 16}, 1000 * k + i));
    b[k] = noisy_copies(xs, 0.2, 777 + 1000 * k);
    a[k] = std::move(xs);
  }
  const PsdMap m = class_averaged_shift_psd(a, b);
  const double mean = std::accumulate(m.power.begin(), m.power.end(), 0.0) / m.power.size();
  EXPECT_NEAR(mean, 0.04, 0.04 * 0.15);
  // Away from the lowest frequencies the image power is small and each
  // annulus settles near the noise variance.
  for (const auto& bin : radial_profile(m)) {
    if (bin.center > 0.25) {
      EXPECT_NEAR(bin.mean_power, 0.04, 0.04 * 0.15) << bin.center;
    }
  }
}

TEST(ClassAveragedShiftPsd, RandomSplitOfOnePoolIsNearZero) {
  std::vector<ImageTensor> pool;
  for (std::uint64_t i = 0; i < 1200; ++i) pool.push_back(white_noise_image({1, 16, 16}, 1.0, i));
  std::mt19937_64 rng(8);
  std::shuffle(pool.begin(), pool.end(), rng);
  ClassGroups a, b;
  for (int k = 0; k < 3; ++k) {
    a[k].assign(pool.begin() + 400 * k, pool.begin() + 400 * k + 200);
    b[k].assign(pool.begin() + 400 * k + 200, pool.begin() + 400 * (k + 1));
  }
  const PsdMap m = class_averaged_shift_psd(a, b);
  const double mean = std::accumulate(m.power.begin(), m.power.end(), 0.0) / m.power.size();
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_EQ(m.source_count, 1200u);
}

TEST(ClassAveragedShiftPsd, RejectsMismatchedClasses) {
  ClassGroups a{{0, {ImageTensor({1, 4, 4})}}}, b{{1, {ImageTensor({1, 4, 4})}}};
  EXPECT_THROW(class_averaged_shift_psd(a, b), InvalidInput);
  EXPECT_THROW(class_averaged_shift_psd({}, {}), InvalidInput);
}

TEST(RadialProfile, MatchesBruteForce) {
  const std::size_t h = 12, w = 10;
  PsdMap m{h, w, std::vector<double>(h * w), 1};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 2);
  for (auto& p : m.power) p = u(rng);
  const auto prof = radial_profile(m);
  std::size_t covered = 0;
  for (const auto& bin : prof) {
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const double rad = oracle_radius(r, c, h, w);
        const double lo = bin.center - 0.025, hi = bin.center + 0.025;
        const bool last = bin.center > 0.97;
        if (rad >= lo && (rad < hi || (last && rad <= 1.0))) {
          sum += m.power[r * w + c];
          ++n;
        }
      }
    }
    EXPECT_EQ(bin.bins, n) << bin.center;
    EXPECT_NEAR(bin.mean_power, sum / n, 1e-12);
    covered += n;
  }
  EXPECT_EQ(covered, h * w);
  EXPECT_NEAR(prof.front().center, 0.025, 1e-12);
}

TEST(RadialProfile, DcOnlyAndFlatMaps) {
  PsdMap dc{16, 16, std::vector<double>(256, 0.0), 1};
  dc.power[0] = 4.0;
  const auto prof = radial_profile(dc);
  EXPECT_GT(prof.front().mean_power, 0.0);
  for (std::size_t i = 1; i < prof.size(); ++i) EXPECT_EQ(prof[i].mean_power, 0.0);
  const PsdMap flat{16, 16, std::vector<double>(256, 0.7), 1};
  for (const auto& bin : radial_profile(flat)) EXPECT_NEAR(bin.mean_power, 0.7, 1e-15);
}

TEST(BandFractions, FlatMapSharesMatchBinCounts) {
  const std::size_t h = 32, w = 32;
  PsdMap m{h, w, std::vector<double>(h * w, 2.0), 1};
  const double e1 = std::sqrt(2.0) / 6, e2 = std::sqrt(2.0) / 3;
  double lo = 0, mid = 0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double rad = oracle_radius(r, c, h, w);
      lo += rad <= e1;
      mid += rad > e1 && rad <= e2;
    }
  }
  const auto f = band_fractions(m);
  EXPECT_NEAR(f.low, lo / (h * w), 1e-12);
  EXPECT_NEAR(f.mid, mid / (h * w), 1e-12);
  EXPECT_NEAR(f.low + f.mid + f.high, 1.0, 1e-12);
  EXPECT_GT(f.high, f.mid);
}

TEST(BandFractions, ConcentratedPower) {
  PsdMap m{8, 8, std::vector<double>(64, 0.0), 1};
  m.power[0] = 5;
  EXPECT_DOUBLE_EQ(band_fractions(m).low, 1.0);
  m.power[0] = 0;
  m.power[4 * 8 + 4] = -3;  // Nyquist corner, radius 1; sign is ignored
  const auto f = band_fractions(m);
  EXPECT_DOUBLE_EQ(f.high, 1.0);
  EXPECT_DOUBLE_EQ(f.low, 0.0);
  EXPECT_THROW(band_fractions(m, {0.5, 0.4}), InvalidInput);
  const auto custom = band_fractions(m, {0.2, 0.99});
  EXPECT_DOUBLE_EQ(custom.high, 1.0);
}

TEST(BandFractions, BlurShiftsTowardLowerBandsThanNoise) {
  std::vector<ImageTensor> xs;
  for (std::uint64_t i = 0; i < 200; ++i) xs.push_back(natural_image({1, 32, 32}, i));
  std::vector<ImageTensor> blurred;
  for (const auto& x : xs) {
    CorruptionSpec s;
    s.kind = CorruptionKind::gaussian_blur;
    s.param = 1.5;
    blurred.push_back(apply_corruption(x, s));
  }
  const auto fb = band_fractions(paired_shift_psd(xs, blurred));
  const auto fn = band_fractions(paired_shift_psd(xs, noisy_copies(xs, 0.3, 1)));
  EXPECT_LT(fb.high, fn.high);
  EXPECT_GT(fb.low + fb.mid, fn.low + fn.mid);
}

}  // namespace
}  // namespace specrob
