#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/rng.hpp"
#include "specrob/spectral.hpp"
#include "specrob/tensor.hpp"

namespace specrob {

enum class PathMode { amplitude, phase, pixel };
enum class ClassRelation { within, between, unconstrained };

inline const char* to_string(PathMode m) {
  switch (m) {
    case PathMode::amplitude: return "amplitude";
    case PathMode::phase: return "phase";
    case PathMode::pixel: return "pixel";
  }
  return "?";
}

inline const char* to_string(ClassRelation r) {
  switch (r) {
    case ClassRelation::within: return "within";
    case ClassRelation::between: return "between";
    case ClassRelation::unconstrained: return "any";
  }
  return "?";
}

inline PathMode parse_path_mode(const std::string& s) {
  if (s == "amplitude") return PathMode::amplitude;
  if (s == "phase") return PathMode::phase;
  if (s == "pixel") return PathMode::pixel;
  throw InvalidInput("unknown path mode '" + s + "'");
}

inline ClassRelation parse_class_relation(const std::string& s) {
  if (s == "within") return ClassRelation::within;
  if (s == "between") return ClassRelation::between;
  if (s == "any" || s == "unconstrained") return ClassRelation::unconstrained;
  throw InvalidInput("unknown class relation '" + s + "'");
}

// Defaults used for CIFAR-scale inputs; large images use a phase cutoff of
// 0.2 and an amplitude cutoff of 1.0.
inline constexpr std::size_t kDefaultSteps = 100;
inline constexpr double kDefaultCutoff = 0.4;
inline constexpr double kLargeImagePhaseCutoff = 0.2;
inline constexpr double kLargeImageAmplitudeCutoff = 1.0;

struct PathSpec {
  PathMode mode = PathMode::amplitude;
  std::size_t source_index = 0;
  std::size_t target_index = 0;
  ClassRelation class_relation = ClassRelation::unconstrained;
  double cutoff = kDefaultCutoff;
  std::size_t steps = kDefaultSteps;
  std::uint64_t seed = 0;
};

struct InterpolationPath {
  std::vector<ImageTensor> images;
  std::vector<double> lambdas;
};

inline std::vector<double> lambda_grid(std::size_t steps) {
  require(steps >= 2, "path needs at least 2 steps");
  std::vector<double> l(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    l[t] = static_cast<double>(t) / static_cast<double>(steps - 1);
  }
  return l;
}

/// Shortest-arc interpolation from p0 toward p1, result in (-pi, pi].
/// An exact antipodal pair travels in the positive direction.
inline double interpolate_phase(double p0, double p1, double lambda) {
  const double delta = wrap_angle(p1 - p0);
  return wrap_angle(p0 + lambda * delta);
}

// A bin equal to its own conjugate partner (DC and the Nyquist rows/columns
// crossings). A real image has a real coefficient there.
inline bool is_self_conjugate(std::size_t r, std::size_t c, std::size_t h,
                              std::size_t w) {
  return (2 * r) % h == 0 && (2 * c) % w == 0;
}

/// Blends the low-frequency Fourier amplitude or phase of a source image
/// toward a target image. Decompositions are computed once and reused for
/// every lambda.
class FourierInterpolator {
 public:
  FourierInterpolator(const ImageTensor& x0, const ImageTensor& x1, double rho)
      : shape_(x0.shape()) {
    require_same_shape(x0, x1, "Fourier interpolation");
    source_spectrum_ = dft2(x0);
    source_ = decompose(source_spectrum_);
    target_ = decompose(dft2(x1));
    mask_ = radial_mask(shape_.height, shape_.width, rho);
    source_unit_ = Spectrum(shape_);
    for (std::size_t i = 0; i < source_unit_.size(); ++i) {
      source_unit_.values()[i] = std::polar(1.0, source_.phase.values()[i]);
    }
  }

  const FourierDecomposition& source() const { return source_; }
  const FourierDecomposition& target() const { return target_; }
  const RadialMask& mask() const { return mask_; }

  /// Masked bins take (1 - lambda) a0 + lambda a1; phase stays p0.
  ImageTensor amplitude_at(double lambda) const {
    Spectrum s = source_spectrum_;
    for_each_masked_bin([&](std::size_t i, std::size_t, std::size_t) {
      const double a = (1.0 - lambda) * source_.amplitude.values()[i] +
                       lambda * target_.amplitude.values()[i];
      s.values()[i] = a * source_unit_.values()[i];
    });
    return idft2_real(s);
  }

  /// Masked bins move along the shortest arc from p0 toward p1; amplitude
  /// stays a0. Self-conjugate bins must stay real, so their phase snaps to
  /// whichever of {0, pi} the arc is nearer.
  ImageTensor phase_at(double lambda) const {
    Spectrum s = source_spectrum_;
    for_each_masked_bin([&](std::size_t i, std::size_t r, std::size_t c) {
      double p = interpolate_phase(source_.phase.values()[i],
                                   target_.phase.values()[i], lambda);
      if (is_self_conjugate(r, c, shape_.height, shape_.width)) {
        p = std::cos(p) >= 0.0 ? 0.0 : std::numbers::pi;
      }
      s.values()[i] = std::polar(source_.amplitude.values()[i], p);
    });
    return idft2_real(s);
  }

 private:
  template <typename F>
  void for_each_masked_bin(F&& f) const {
    for (std::size_t ch = 0; ch < shape_.channels; ++ch) {
      for (std::size_t r = 0; r < shape_.height; ++r) {
        for (std::size_t c = 0; c < shape_.width; ++c) {
          if (mask_.contains(r, c)) {
            f((ch * shape_.height + r) * shape_.width + c, r, c);
          }
        }
      }
    }
  }

  Shape3 shape_;
  Spectrum source_spectrum_;
  Spectrum source_unit_;  // exp(i * p0)
  FourierDecomposition source_;
  FourierDecomposition target_;
  RadialMask mask_;
};

inline InterpolationPath amplitude_path(const ImageTensor& x0,
                                        const ImageTensor& x1, double rho,
                                        std::size_t steps) {
  validate(x0, "amplitude_path source");
  validate(x1, "amplitude_path target");
  InterpolationPath path{{}, lambda_grid(steps)};
  FourierInterpolator interp(x0, x1, rho);
  path.images.reserve(steps);
  for (double l : path.lambdas) path.images.push_back(interp.amplitude_at(l));
  return path;
}

inline InterpolationPath phase_path(const ImageTensor& x0, const ImageTensor& x1,
                                    double rho, std::size_t steps) {
  validate(x0, "phase_path source");
  validate(x1, "phase_path target");
  InterpolationPath path{{}, lambda_grid(steps)};
  FourierInterpolator interp(x0, x1, rho);
  path.images.reserve(steps);
  for (double l : path.lambdas) path.images.push_back(interp.phase_at(l));
  return path;
}

inline InterpolationPath pixel_path(const ImageTensor& x0, const ImageTensor& x1,
                                    std::size_t steps) {
  validate(x0, "pixel_path source");
  validate(x1, "pixel_path target");
  require_same_shape(x0, x1, "pixel_path");
  InterpolationPath path{{}, lambda_grid(steps)};
  path.images.reserve(steps);
  for (double l : path.lambdas) {
    ImageTensor img(x0.shape());
    for (std::size_t i = 0; i < img.size(); ++i) {
      img.values()[i] = (1.0 - l) * x0.values()[i] + l * x1.values()[i];
    }
    path.images.push_back(std::move(img));
  }
  return path;
}

inline InterpolationPath make_path(PathMode mode, const ImageTensor& x0,
                                   const ImageTensor& x1, double rho,
                                   std::size_t steps) {
  switch (mode) {
    case PathMode::amplitude: return amplitude_path(x0, x1, rho, steps);
    case PathMode::phase: return phase_path(x0, x1, rho, steps);
    case PathMode::pixel: return pixel_path(x0, x1, steps);
  }
  throw InvalidInput("unknown path mode");
}

/// Draws n_paths (source, target) pairs uniformly over the ordered pairs of
/// distinct indices that satisfy class_relation. Spec i uses the stream
/// derived from (seed, i).
inline std::vector<PathSpec> sample_path_specs(const std::vector<int>& labels,
                                               std::size_t n_paths,
                                               PathMode mode,
                                               ClassRelation relation,
                                               double rho, std::size_t steps,
                                               std::uint64_t seed) {
  require(n_paths >= 1, "sample_path_specs: n_paths must be >= 1");
  require(labels.size() >= 2, "sample_path_specs: need at least 2 items");
  require(steps >= 2, "sample_path_specs: steps must be >= 2");
  require(rho >= 0.0 && rho <= 1.0, "sample_path_specs: cutoff outside [0, 1]");

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  const std::size_t n = labels.size();

  // Source weight = number of valid partners, so (source, target) is
  // uniform over valid ordered pairs.
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t same = members[labels[i]].size();
    switch (relation) {
      case ClassRelation::within: weight[i] = static_cast<double>(same - 1); break;
      case ClassRelation::between: weight[i] = static_cast<double>(n - same); break;
      case ClassRelation::unconstrained: weight[i] = static_cast<double>(n - 1); break;
    }
  }
  bool any = false;
  for (double w : weight) any = any || w > 0.0;
  if (!any) {
    throw InvalidInput(std::string("sample_path_specs: no pair satisfies class relation '") +
                       to_string(relation) + "'");
  }

  std::vector<PathSpec> specs;
  specs.reserve(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    Rng rng = make_rng(seed, {p});
    std::discrete_distribution<std::size_t> pick_source(weight.begin(), weight.end());
    const std::size_t src = pick_source(rng);
    std::size_t tgt = src;
    if (relation == ClassRelation::within) {
      const auto& same = members[labels[src]];
      std::uniform_int_distribution<std::size_t> pick(0, same.size() - 2);
      std::size_t k = pick(rng);
      // Skip over the source's own slot.
      std::size_t pos = 0;
      while (same[pos] != src) ++pos;
      tgt = same[k >= pos ? k + 1 : k];
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(weight[src]) - 1);
      std::size_t k = pick(rng);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == src) continue;
        if (relation == ClassRelation::between && labels[j] == labels[src]) continue;
        if (k == 0) {
          tgt = j;
          break;
        }
        --k;
      }
    }
    specs.push_back({mode, src, tgt, relation, rho, steps, derive_seed(seed, {p})});
  }
  return specs;
}

}  // namespace specrob
