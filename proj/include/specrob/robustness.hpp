#pragma once

// Probit-domain regression of OOD accuracy on ID accuracy or a model metric,
// with exact binomial intervals for accuracy measurements.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "specrob/error.hpp"

namespace specrob {

inline constexpr double kProbitClamp = 1e-6;

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Exact (Clopper-Pearson) binomial interval at level 1 - alpha.
inline Interval clopper_pearson(long correct, long total, double alpha = 0.05) {
  require(total >= 1 && correct >= 0 && correct <= total,
          "clopper_pearson: need 0 <= correct <= total and total >= 1");
  require(alpha > 0.0 && alpha < 1.0, "clopper_pearson: alpha must lie in (0, 1)");
  const auto k = static_cast<double>(correct);
  const auto n = static_cast<double>(total);
  Interval ci{0.0, 1.0};
  if (correct > 0) ci.low = boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  if (correct < total) ci.high = boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return ci;
}

inline double normal_cdf(double z) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

/// Inverse standard normal CDF of p clamped to [eps, 1 - eps].
inline double probit(double p, double eps = kProbitClamp) {
  require(p >= 0.0 && p <= 1.0, "probit: p must lie in [0, 1]");
  const double q = std::clamp(p, eps, 1.0 - eps);
  return boost::math::quantile(boost::math::normal_distribution<double>(), q);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept. When y has no variance,
/// R^2 is 1 for a perfect fit and 0 otherwise.
inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size(), "fit_line: xs and ys differ in length");
  if (xs.size() < 2) throw DegenerateFit("fit_line: need at least 2 points");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DegenerateFit("fit_line: all x values are equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.slope * xs[i] + f.intercept);
    ss_res += r * r;
  }
  if (syy > 0.0) {
    f.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    f.r2 = ss_res == 0.0 ? 1.0 : 0.0;
  }
  return f;
}

struct AccuracyRecord {
  std::string model_id;
  std::string group;
  std::string dataset_id;
  long correct = 0;
  long total = 1;

  double accuracy() const { return static_cast<double>(correct) / static_cast<double>(total); }
};

enum class ValueKind { accuracy, raw };

struct MetricRecord {
  std::string model_id;
  std::string metric_name;
  double value = 0.0;
  ValueKind value_kind = ValueKind::raw;
};

inline void validate(const AccuracyRecord& r) {
  require(r.total >= 1 && r.correct >= 0 && r.correct <= r.total,
          "accuracy record for model '" + r.model_id + "' needs 0 <= correct <= total, total >= 1");
}

inline void validate(const MetricRecord& r) {
  require(std::isfinite(r.value), "metric '" + r.metric_name + "' for model '" + r.model_id + "' is not finite");
  if (r.value_kind == ValueKind::accuracy) {
    require(r.value >= 0.0 && r.value <= 1.0,
            "accuracy-kind metric '" + r.metric_name + "' for model '" + r.model_id + "' outside [0, 1]");
  }
}

// How the predictor axis is transformed before fitting.
enum class XTransform { by_kind, probit, raw };

inline constexpr const char* kIdAccuracy = "ID accuracy";

struct RegressionQuery {
  std::string x_spec = kIdAccuracy;  // "ID accuracy" or a metric name
  std::string id_dataset = "id";
  std::string ood_dataset;
  std::string group_by = "group";  // "group" or "all"
  XTransform x_transform = XTransform::by_kind;
};

struct GroupFit {
  std::string group;
  LineFit fit;
  std::size_t n_models = 0;
};

struct SkippedGroup {
  std::string group;
  std::string reason;
};

struct RegressionPoint {
  std::string model_id;
  std::string group;
  double x = 0.0;  // transformed predictor
  double y = 0.0;  // probit OOD accuracy
  double y_low = 0.0;
  double y_high = 0.0;
};

struct ProbitRegression {
  std::vector<GroupFit> per_group;
  std::vector<SkippedGroup> skipped;
  std::vector<RegressionPoint> points;
  double averaged_m = 0.0;
  double averaged_r2 = 0.0;
  bool x_probit = false;
};

/// Unweighted means of slope and R^2 over group fits, never a pooled refit.
inline std::pair<double, double> average_group_fits(std::span<const GroupFit> fits) {
  require(!fits.empty(), "average_group_fits: no fitted groups");
  double sum_m = 0.0, sum_r2 = 0.0;
  for (const auto& g : fits) {
    sum_m += g.fit.slope;
    sum_r2 += g.fit.r2;
  }
  const auto n = static_cast<double>(fits.size());
  return {sum_m / n, sum_r2 / n};
}

/// Per-group probit-domain fits of OOD accuracy against the requested
/// predictor; averaged slope and R^2 are unweighted means over fitted groups.
inline ProbitRegression grouped_regression(std::span<const AccuracyRecord> accuracies,
                                           std::span<const MetricRecord> metrics,
                                           const RegressionQuery& query) {
  require(!query.ood_dataset.empty(), "grouped_regression: OOD dataset id is required");
  require(query.group_by == "group" || query.group_by == "all",
          "grouped_regression: group_by must be 'group' or 'all'");
  for (const auto& r : accuracies) validate(r);
  for (const auto& r : metrics) validate(r);

  struct ModelRow {
    std::string group;
    std::optional<AccuracyRecord> ood;
    std::optional<double> x;
    std::optional<ValueKind> x_kind;
  };
  std::map<std::string, ModelRow> models;
  const bool x_is_id = query.x_spec == kIdAccuracy;
  for (const auto& r : accuracies) {
    auto& m = models[r.model_id];
    if (r.dataset_id == query.ood_dataset) {
      m.ood = r;
      m.group = query.group_by == "all" ? "all" : r.group;
    }
    if (x_is_id && r.dataset_id == query.id_dataset) {
      m.x = r.accuracy();
      m.x_kind = ValueKind::accuracy;
    }
  }
  if (!x_is_id) {
    for (const auto& r : metrics) {
      if (r.metric_name != query.x_spec) continue;
      auto& m = models[r.model_id];
      m.x = r.value;
      m.x_kind = r.value_kind;
    }
  }

  const auto transform_x = [&](double v, ValueKind kind) {
    switch (query.x_transform) {
      case XTransform::probit: return probit(std::clamp(v, 0.0, 1.0));
      case XTransform::raw: return v;
      case XTransform::by_kind: return kind == ValueKind::accuracy ? probit(v) : v;
    }
    return v;
  };

  ProbitRegression out;
  std::map<std::string, std::vector<RegressionPoint>> groups;
  std::set<bool> probit_used;
  for (const auto& [id, m] : models) {
    if (!m.ood || !m.x) continue;
    const auto ci = clopper_pearson(m.ood->correct, m.ood->total);
    RegressionPoint p{id, m.group, transform_x(*m.x, *m.x_kind), probit(m.ood->accuracy()),
                      probit(ci.low), probit(ci.high)};
    probit_used.insert(query.x_transform == XTransform::probit ||
                       (query.x_transform == XTransform::by_kind && *m.x_kind == ValueKind::accuracy));
    groups[m.group].push_back(p);
    out.points.push_back(p);
  }
  out.x_probit = probit_used.count(true) > 0 && probit_used.count(false) == 0;

  for (const auto& [group, pts] : groups) {
    if (pts.size() < 2) {
      out.skipped.push_back({group, "fewer than 2 models with both predictor and OOD accuracy"});
      continue;
    }
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    try {
      const LineFit f = fit_line(xs, ys);
      out.per_group.push_back({group, f, pts.size()});
    } catch (const DegenerateFit& e) {
      out.skipped.push_back({group, e.what()});
    }
  }
  if (!out.per_group.empty()) {
    std::tie(out.averaged_m, out.averaged_r2) = average_group_fits(out.per_group);
  }
  return out;
}

/// Probit-domain residual above the baseline line; positive means the model
/// is more robust than its ID accuracy predicts.
inline double effective_robustness(double id_accuracy, double ood_accuracy, double slope,
                                   double intercept) {
  return probit(ood_accuracy) - (slope * probit(id_accuracy) + intercept);
}

}  // namespace specrob
