#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/spectral.hpp"
#include "specrob/tensor.hpp"

namespace specrob {

struct BandFractions {
  double low = 0.0;
  double mid = 0.0;
  double high = 0.0;
};

struct BandEdges {
  double low_mid = 0.0;
  double mid_high = 0.0;
};

// Thirds of the axis-aligned Nyquist radius (1/sqrt(2) in normalized-radius
// units); everything beyond two thirds, including the corners, is "high".
inline constexpr BandEdges kDefaultBandEdges{std::numbers::sqrt2 / 6.0,
                                             std::numbers::sqrt2 / 3.0};

inline constexpr double kRadialBinWidth = 0.05;

struct RadialBin {
  double center = 0.0;
  double mean_power = 0.0;
  std::size_t bins = 0;
};

/// PSD of the per-pair difference images corrupted[i] - originals[i].
inline PsdMap paired_shift_psd(std::span<const ImageTensor> originals,
                               std::span<const ImageTensor> corrupted) {
  require(!originals.empty(), "paired_shift_psd: no images");
  require(originals.size() == corrupted.size(),
          "paired_shift_psd: length mismatch " + std::to_string(originals.size()) +
              " vs " + std::to_string(corrupted.size()));
  std::vector<ImageTensor> diffs;
  diffs.reserve(originals.size());
  for (std::size_t i = 0; i < originals.size(); ++i) {
    if (originals[i].shape() != corrupted[i].shape()) {
      throw InvalidInput("paired_shift_psd: shape mismatch at index " + std::to_string(i));
    }
    ImageTensor d(originals[i].shape());
    for (std::size_t k = 0; k < d.size(); ++k) {
      d.values()[k] = corrupted[i].values()[k] - originals[i].values()[k];
    }
    diffs.push_back(std::move(d));
  }
  return psd(diffs);
}

using ClassGroups = std::map<int, std::vector<ImageTensor>>;

/// Mean over classes of psd(b_k) - psd(a_k). Values may be negative.
inline PsdMap class_averaged_shift_psd(const ClassGroups& a, const ClassGroups& b) {
  require(!a.empty(), "class_averaged_shift_psd: no classes");
  require(a.size() == b.size(), "class_averaged_shift_psd: class keys differ");
  PsdMap out;
  std::size_t sources = 0;
  for (const auto& [label, group_a] : a) {
    auto it = b.find(label);
    require(it != b.end(), "class_averaged_shift_psd: class " + std::to_string(label) +
                               " missing from second set");
    require(!group_a.empty() && !it->second.empty(),
            "class_averaged_shift_psd: empty group for class " + std::to_string(label));
    const PsdMap pa = psd(group_a);
    const PsdMap pb = psd(it->second);
    require(pa.height == pb.height && pa.width == pb.width,
            "class_averaged_shift_psd: shape mismatch for class " + std::to_string(label));
    if (out.power.empty()) {
      out.height = pa.height;
      out.width = pa.width;
      out.power.assign(pa.power.size(), 0.0);
    }
    require(pa.height == out.height && pa.width == out.width,
            "class_averaged_shift_psd: classes have different image shapes");
    for (std::size_t i = 0; i < out.power.size(); ++i) {
      out.power[i] += pb.power[i] - pa.power[i];
    }
    sources += group_a.size() + it->second.size();
  }
  for (auto& v : out.power) v /= static_cast<double>(a.size());
  out.source_count = sources;
  return out;
}

/// Mean power per annulus of width 0.05 in normalized radius; empty annuli
/// are omitted.
inline std::vector<RadialBin> radial_profile(const PsdMap& map) {
  const auto n_bins = static_cast<std::size_t>(std::round(1.0 / kRadialBinWidth));
  std::vector<double> sum(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (std::size_t r = 0; r < map.height; ++r) {
    for (std::size_t c = 0; c < map.width; ++c) {
      const double rad = normalized_radius(r, c, map.height, map.width);
      const auto k = std::min(n_bins - 1, static_cast<std::size_t>(rad / kRadialBinWidth));
      sum[k] += map.at(r, c);
      ++count[k];
    }
  }
  std::vector<RadialBin> out;
  for (std::size_t k = 0; k < n_bins; ++k) {
    if (count[k] == 0) continue;
    out.push_back({(static_cast<double>(k) + 0.5) * kRadialBinWidth,
                   sum[k] / static_cast<double>(count[k]), count[k]});
  }
  return out;
}

/// Shares of total absolute power below, between, and above the edges.
inline BandFractions band_fractions(const PsdMap& map,
                                    BandEdges edges = kDefaultBandEdges) {
  require(edges.low_mid > 0.0 && edges.low_mid < edges.mid_high && edges.mid_high < 1.0,
          "band_fractions: edges must satisfy 0 < r1 < r2 < 1");
  double low = 0.0, mid = 0.0, high = 0.0;
  for (std::size_t r = 0; r < map.height; ++r) {
    for (std::size_t c = 0; c < map.width; ++c) {
      const double p = std::abs(map.at(r, c));
      const double rad = normalized_radius(r, c, map.height, map.width);
      if (rad <= edges.low_mid) {
        low += p;
      } else if (rad <= edges.mid_high) {
        mid += p;
      } else {
        high += p;
      }
    }
  }
  const double total = low + mid + high;
  if (!(total > 0.0)) throw UndefinedMetric("band_fractions: map has no power");
  BandFractions f{low / total, mid / total, 0.0};
  f.high = 1.0 - f.low - f.mid;
  if (f.high < 0.0) f.high = 0.0;
  return f;
}

}  // namespace specrob
