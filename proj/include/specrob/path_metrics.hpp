#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/fft.hpp"

namespace specrob {

inline constexpr std::size_t kDefaultHffThreshold = 10;
inline constexpr double kProbabilitySumTolerance = 1e-4;

/// Class probabilities along one path: `steps` rows of `classes` values.
class PredictionTrace {
 public:
  PredictionTrace(std::string path_id, std::size_t steps, std::size_t classes,
                  std::vector<double> probs)
      : path_id_(std::move(path_id)), steps_(steps), classes_(classes),
        probs_(std::move(probs)) {
    require(steps_ >= 2, "trace '" + path_id_ + "': need at least 2 steps");
    require(classes_ >= 2, "trace '" + path_id_ + "': need at least 2 classes");
    require(probs_.size() == steps_ * classes_,
            "trace '" + path_id_ + "': data length does not match steps x classes");
    for (std::size_t t = 0; t < steps_; ++t) {
      double sum = 0.0;
      for (double p : row(t)) {
        require(std::isfinite(p) && p >= 0.0,
                "trace '" + path_id_ + "': negative or non-finite probability at step " +
                    std::to_string(t + 1));
        sum += p;
      }
      require(std::abs(sum - 1.0) <= kProbabilitySumTolerance,
              "trace '" + path_id_ + "': probabilities at step " + std::to_string(t + 1) +
                  " sum to " + std::to_string(sum));
    }
  }

  const std::string& path_id() const { return path_id_; }
  std::size_t steps() const { return steps_; }
  std::size_t classes() const { return classes_; }
  double at(std::size_t t, std::size_t k) const { return probs_[t * classes_ + k]; }
  std::span<const double> row(std::size_t t) const {
    return {probs_.data() + t * classes_, classes_};
  }
  const std::vector<double>& values() const { return probs_; }

 private:
  std::string path_id_;
  std::size_t steps_;
  std::size_t classes_;
  std::vector<double> probs_;
};

struct PathMetrics {
  double hff = 0.0;
  std::size_t cd = 0;
};

struct MetricSummary {
  double mean = 0.0;
  double sample_std = 0.0;
  std::size_t n = 0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

/// High frequency fraction: class-averaged one-sided DFT amplitude of the
/// trace columns (bins 0..T/2, DC included), share above threshold_k.
inline double hff(const PredictionTrace& trace,
                  std::size_t threshold_k = kDefaultHffThreshold) {
  const std::size_t steps = trace.steps();
  const std::size_t half = steps / 2;
  require(threshold_k >= 1 && threshold_k <= half,
          "hff: threshold must lie in [1, " + std::to_string(half) + "]");
  std::vector<double> amplitude(half + 1, 0.0);
  std::vector<std::complex<double>> column(steps);
  for (std::size_t k = 0; k < trace.classes(); ++k) {
    for (std::size_t t = 0; t < steps; ++t) column[t] = trace.at(t, k);
    fft::transform(column);
    for (std::size_t f = 0; f <= half; ++f) amplitude[f] += std::abs(column[f]);
  }
  for (auto& a : amplitude) a /= static_cast<double>(trace.classes());
  double total = 0.0;
  for (double a : amplitude) total += a;
  if (!(total > 0.0)) throw UndefinedMetric("hff: trace has zero total amplitude");
  // Bins at rounding level are treated as empty so a constant trace gives
  // exactly 0.
  const double floor = total * 1e-15;
  double above = 0.0;
  for (std::size_t f = threshold_k + 1; f <= half; ++f) {
    if (amplitude[f] > floor) above += amplitude[f];
  }
  return above / total;
}

/// Lowest class index with the maximal probability in a row.
inline std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[best]) best = k;
  }
  return best;
}

/// 1-based step of the first row whose argmax differs from row 1; T when
/// the prediction never changes.
inline std::size_t consistent_distance(const PredictionTrace& trace) {
  const std::size_t origin = argmax(trace.row(0));
  for (std::size_t t = 1; t < trace.steps(); ++t) {
    if (argmax(trace.row(t)) != origin) return t + 1;
  }
  return trace.steps();
}

inline PathMetrics path_metrics(const PredictionTrace& trace,
                                std::size_t threshold_k = kDefaultHffThreshold) {
  return {hff(trace, threshold_k), consistent_distance(trace)};
}

/// Mean, sample std (n - 1), and mean +/- 1.96 std / sqrt(n).
inline MetricSummary summarize_gaussian(std::span<const double> values) {
  require(!values.empty(), "summarize_gaussian: no values");
  const auto n = values.size();
  // Welford updates: a constant sequence yields exactly (c, 0).
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  const double sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  const double half_width = 1.96 * sd / std::sqrt(static_cast<double>(n));
  return {mean, sd, n, mean - half_width, mean + half_width};
}

}  // namespace specrob
