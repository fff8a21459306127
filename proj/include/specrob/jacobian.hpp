#pragma once

// Random-projection estimate of the input-output Jacobian Frobenius norm,
// plus two built-in differentiable predictors with analytic VJPs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/path_metrics.hpp"
#include "specrob/rng.hpp"
#include "specrob/tensor.hpp"

namespace specrob {

enum class OutputTarget { logits, probs };

inline const char* to_string(OutputTarget t) {
  return t == OutputTarget::logits ? "logits" : "probs";
}

inline OutputTarget parse_output_target(const std::string& s) {
  if (s == "logits") return OutputTarget::logits;
  if (s == "probs") return OutputTarget::probs;
  throw InvalidInput("unknown output target '" + s + "'");
}

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    require(data.size() == r * c, "matrix data length does not match shape");
  }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data) s += v * v;
    return std::sqrt(s);
  }
};

// y = M x
inline std::vector<double> multiply(const Matrix& m, std::span<const double> x) {
  require(x.size() == m.cols, "matrix-vector shape mismatch");
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) acc += m(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

// y = M^T v
inline std::vector<double> multiply_transposed(const Matrix& m, std::span<const double> v) {
  require(v.size() == m.rows, "transposed matrix-vector shape mismatch");
  std::vector<double> y(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    for (std::size_t c = 0; c < m.cols; ++c) y[c] += m(r, c) * vr;
  }
  return y;
}

inline std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> p(z.begin(), z.end());
  const double zmax = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (auto& v : p) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

// (diag(p) - p p^T) v
inline std::vector<double> softmax_vjp(std::span<const double> p, std::span<const double> v) {
  double pv = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) pv += p[k] * v[k];
  std::vector<double> g(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) g[k] = p[k] * (v[k] - pv);
  return g;
}

/// A model mapping a flattened input of input_size() values to
/// num_outputs() logits or probabilities.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::size_t input_size() const = 0;
  virtual std::size_t num_outputs() const = 0;
  virtual OutputTarget target() const = 0;
  virtual std::vector<double> forward(std::span<const double> x) const = 0;

  virtual bool has_vjp() const { return false; }
  /// J(x)^T v for the output selected by target().
  virtual std::vector<double> vjp(std::span<const double>, std::span<const double>) const {
    throw Error("predictor has no analytic vector-Jacobian product");
  }

  /// (batch, K) outputs, one row per image.
  Matrix predict(std::span<const ImageTensor> batch) const {
    Matrix out(batch.size(), num_outputs());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      require(batch[i].size() == input_size(),
              "predictor input size " + std::to_string(input_size()) + " does not match image of " +
                  std::to_string(batch[i].size()) + " values");
      const auto y = forward(batch[i].values());
      std::copy(y.begin(), y.end(), out.data.begin() + static_cast<long>(i * out.cols));
    }
    return out;
  }
};

/// Returns W^T v for logits, W^T (diag(p) - p p^T) v for probs with
/// p = softmax(W x + b).
inline std::vector<double> vjp_linear_softmax(const Matrix& weights, std::span<const double> bias,
                                              std::span<const double> x,
                                              std::span<const double> v, OutputTarget target) {
  require(bias.size() == weights.rows, "vjp_linear_softmax: bias length mismatch");
  require(x.size() == weights.cols, "vjp_linear_softmax: input length mismatch");
  require(v.size() == weights.rows, "vjp_linear_softmax: output vector length mismatch");
  if (target == OutputTarget::logits) return multiply_transposed(weights, v);
  auto z = multiply(weights, x);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] += bias[k];
  const auto p = softmax(z);
  return multiply_transposed(weights, softmax_vjp(p, v));
}

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(Matrix weights, std::vector<double> bias, OutputTarget target)
      : weights_(std::move(weights)), bias_(std::move(bias)), target_(target) {
    if (bias_.empty()) bias_.assign(weights_.rows, 0.0);
    require(weights_.rows >= 1 && weights_.cols >= 1, "linear predictor needs a non-empty weight matrix");
    require(bias_.size() == weights_.rows, "linear predictor bias length mismatch");
    require(target_ == OutputTarget::logits || weights_.rows >= 2,
            "probability outputs need at least 2 classes");
  }

  std::size_t input_size() const override { return weights_.cols; }
  std::size_t num_outputs() const override { return weights_.rows; }
  OutputTarget target() const override { return target_; }
  const Matrix& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }

  std::vector<double> forward(std::span<const double> x) const override {
    auto z = multiply(weights_, x);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += bias_[k];
    return target_ == OutputTarget::logits ? z : softmax(z);
  }

  bool has_vjp() const override { return true; }
  std::vector<double> vjp(std::span<const double> x, std::span<const double> v) const override {
    return vjp_linear_softmax(weights_, bias_, x, v, target_);
  }

 private:
  Matrix weights_;
  std::vector<double> bias_;
  OutputTarget target_;
};

struct MlpWeights {
  Matrix hidden_weights;  // (H, D)
  std::vector<double> hidden_bias;
  Matrix output_weights;  // (K, H)
  std::vector<double> output_bias;
};

/// One tanh hidden layer followed by a linear head (softmax for probs).
class MlpPredictor final : public Predictor {
 public:
  MlpPredictor(MlpWeights w, OutputTarget target) : w_(std::move(w)), target_(target) {
    require(w_.hidden_bias.size() == w_.hidden_weights.rows, "mlp hidden bias length mismatch");
    require(w_.output_weights.cols == w_.hidden_weights.rows, "mlp layer sizes do not chain");
    require(w_.output_bias.size() == w_.output_weights.rows, "mlp output bias length mismatch");
    require(w_.output_weights.rows >= 2 || target_ == OutputTarget::logits,
            "probability outputs need at least 2 classes");
  }

  std::size_t input_size() const override { return w_.hidden_weights.cols; }
  std::size_t num_outputs() const override { return w_.output_weights.rows; }
  OutputTarget target() const override { return target_; }
  const MlpWeights& weights() const { return w_; }

  std::vector<double> hidden(std::span<const double> x) const {
    auto h = multiply(w_.hidden_weights, x);
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = std::tanh(h[j] + w_.hidden_bias[j]);
    return h;
  }

  std::vector<double> logits(std::span<const double> x) const {
    const auto h = hidden(x);
    auto z = multiply(w_.output_weights, h);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += w_.output_bias[k];
    return z;
  }

  std::vector<double> forward(std::span<const double> x) const override {
    auto z = logits(x);
    return target_ == OutputTarget::logits ? z : softmax(z);
  }

  bool has_vjp() const override { return true; }
  std::vector<double> vjp(std::span<const double> x, std::span<const double> v) const override {
    const auto h = hidden(x);
    std::vector<double> gz(v.begin(), v.end());
    if (target_ == OutputTarget::probs) {
      auto z = multiply(w_.output_weights, h);
      for (std::size_t k = 0; k < z.size(); ++k) z[k] += w_.output_bias[k];
      gz = softmax_vjp(softmax(z), v);
    }
    auto gh = multiply_transposed(w_.output_weights, gz);
    for (std::size_t j = 0; j < gh.size(); ++j) gh[j] *= 1.0 - h[j] * h[j];
    return multiply_transposed(w_.hidden_weights, gh);
  }

 private:
  MlpWeights w_;
  OutputTarget target_;
};

/// Black-box predictor over a callable; Jacobian products fall back to
/// finite differences.
class FunctionPredictor final : public Predictor {
 public:
  using Fn = std::function<std::vector<double>(std::span<const double>)>;

  FunctionPredictor(Fn fn, std::size_t input_size, std::size_t outputs, OutputTarget target)
      : fn_(std::move(fn)), input_size_(input_size), outputs_(outputs), target_(target) {}

  std::size_t input_size() const override { return input_size_; }
  std::size_t num_outputs() const override { return outputs_; }
  OutputTarget target() const override { return target_; }
  std::vector<double> forward(std::span<const double> x) const override {
    auto y = fn_(x);
    require(y.size() == outputs_, "function predictor returned the wrong number of outputs");
    return y;
  }

 private:
  Fn fn_;
  std::size_t input_size_;
  std::size_t outputs_;
  OutputTarget target_;
};

inline constexpr double kDefaultFdEpsilon = 1e-4;

/// Central difference (f(x + eps u) - f(x - eps u)) / (2 eps).
inline std::vector<double> fd_directional_derivative(const Predictor& predictor,
                                                     std::span<const double> x,
                                                     std::span<const double> direction,
                                                     double eps = kDefaultFdEpsilon) {
  require(eps > 0.0, "finite difference step must be positive");
  require(x.size() == predictor.input_size() && direction.size() == x.size(),
          "finite difference: input and direction sizes must match the predictor");
  double norm2 = 0.0;
  for (double u : direction) norm2 += u * u;
  require(std::abs(std::sqrt(norm2) - 1.0) <= 1e-9, "finite difference direction must be a unit vector");
  std::vector<double> plus(x.begin(), x.end()), minus(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] += eps * direction[i];
    minus[i] -= eps * direction[i];
  }
  const auto fp = predictor.forward(plus);
  const auto fm = predictor.forward(minus);
  std::vector<double> d(fp.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = (fp[k] - fm[k]) / (2.0 * eps);
  return d;
}

inline constexpr std::size_t kDefaultProjections = 10;
inline constexpr std::size_t kDefaultJacobianBatch = 400;

struct JacobianConfig {
  std::size_t n_proj = kDefaultProjections;
  std::size_t batch_size = kDefaultJacobianBatch;
  std::uint64_t seed = 0;
  double fd_eps = kDefaultFdEpsilon;
};

enum class JacobianMethod { analytic_vjp, finite_difference };

struct JacobianEstimate {
  double frobenius_norm = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::size_t n_estimates = 0;
  JacobianMethod method = JacobianMethod::analytic_vjp;
  // Squared-norm estimates in (sample, projection) order.
  std::vector<double> squared_estimates;
};

/// Uniform draw from the unit sphere in `dim` dimensions.
inline std::vector<double> random_unit_vector(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double norm = std::sqrt(norm2);
  for (auto& x : v) x /= norm;
  return v;
}

/// Unbiased squared-norm estimates e with E[e] = ||J(x)||_F^2: K ||J^T v||^2
/// for output-space unit vectors v when an analytic VJP exists, otherwise
/// D ||J u||^2 for input-space unit vectors u via central differences. The
/// reported norm is sqrt(mean e) and the 95% Gaussian interval on mean e is
/// mapped through sqrt.
inline JacobianEstimate estimate_jacobian_norm(const Predictor& predictor,
                                               std::span<const ImageTensor> batch,
                                               const JacobianConfig& config) {
  require(config.n_proj >= 1 && config.batch_size >= 1, "n_proj and batch size must be >= 1");
  require(batch.size() == config.batch_size,
          "jacobian: batch holds " + std::to_string(batch.size()) + " images, expected " +
              std::to_string(config.batch_size));
  const bool analytic = predictor.has_vjp();
  const std::size_t k_out = predictor.num_outputs();
  const std::size_t d_in = predictor.input_size();

  JacobianEstimate est;
  est.method = analytic ? JacobianMethod::analytic_vjp : JacobianMethod::finite_difference;
  est.squared_estimates.reserve(config.n_proj * config.batch_size);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto& x = batch[s].values();
    require(x.size() == d_in, "jacobian: image size does not match predictor input size");
    for (std::size_t j = 0; j < config.n_proj; ++j) {
      Rng rng = make_rng(config.seed, {s, j});
      double e = 0.0;
      if (analytic) {
        const auto v = random_unit_vector(rng, k_out);
        for (double g : predictor.vjp(x, v)) e += g * g;
        e *= static_cast<double>(k_out);
      } else {
        const auto u = random_unit_vector(rng, d_in);
        for (double g : fd_directional_derivative(predictor, x, u, config.fd_eps)) e += g * g;
        e *= static_cast<double>(d_in);
      }
      est.squared_estimates.push_back(e);
    }
  }
  const MetricSummary summary = summarize_gaussian(est.squared_estimates);
  est.n_estimates = summary.n;
  est.frobenius_norm = std::sqrt(std::max(0.0, summary.mean));
  est.ci95_low = std::sqrt(std::max(0.0, summary.ci95_low));
  est.ci95_high = std::sqrt(std::max(0.0, summary.ci95_high));
  return est;
}

struct MlpTrainingConfig {
  std::size_t hidden_units = 16;
  std::size_t iterations = 200;
  double learning_rate = 0.5;
  double init_scale = 0.05;
  std::uint64_t seed = 0;
};

/// Full-batch gradient descent on mean cross-entropy. Deterministic given
/// the seed.
inline MlpPredictor train_mlp(std::span<const ImageTensor> images, std::span<const int> labels,
                              std::size_t classes, const MlpTrainingConfig& config) {
  require(!images.empty() && images.size() == labels.size(), "train_mlp: images and labels must pair up");
  require(classes >= 2, "train_mlp: need at least 2 classes");
  const std::size_t d = images.front().size();
  const std::size_t h = config.hidden_units;
  for (int y : labels) require(y >= 0 && static_cast<std::size_t>(y) < classes, "train_mlp: label out of range");

  MlpWeights w{Matrix(h, d), std::vector<double>(h, 0.0), Matrix(classes, h),
               std::vector<double>(classes, 0.0)};
  Rng rng = make_rng(config.seed, {0});
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s1 = config.init_scale, s2 = 1.0 / std::sqrt(static_cast<double>(h));
  for (auto& v : w.hidden_weights.data) v = s1 * normal(rng);
  for (auto& v : w.output_weights.data) v = s2 * normal(rng);

  const double inv_n = 1.0 / static_cast<double>(images.size());
  for (std::size_t it = 0; it < config.iterations; ++it) {
    Matrix g1(h, d), g2(classes, h);
    std::vector<double> gb1(h, 0.0), gb2(classes, 0.0);
    const MlpPredictor model(w, OutputTarget::probs);
    for (std::size_t i = 0; i < images.size(); ++i) {
      const auto& x = images[i].values();
      const auto hid = model.hidden(x);
      auto z = multiply(w.output_weights, hid);
      for (std::size_t k = 0; k < classes; ++k) z[k] += w.output_bias[k];
      auto gz = softmax(z);
      gz[static_cast<std::size_t>(labels[i])] -= 1.0;
      for (std::size_t k = 0; k < classes; ++k) {
        gb2[k] += gz[k] * inv_n;
        for (std::size_t j = 0; j < h; ++j) g2(k, j) += gz[k] * hid[j] * inv_n;
      }
      auto gh = multiply_transposed(w.output_weights, gz);
      for (std::size_t j = 0; j < h; ++j) {
        const double ga = gh[j] * (1.0 - hid[j] * hid[j]) * inv_n;
        gb1[j] += ga;
        if (ga == 0.0) continue;
        double* row = &g1(j, 0);
        for (std::size_t c = 0; c < d; ++c) row[c] += ga * x[c];
      }
    }
    const double lr = config.learning_rate;
    for (std::size_t i = 0; i < w.hidden_weights.data.size(); ++i) w.hidden_weights.data[i] -= lr * g1.data[i];
    for (std::size_t i = 0; i < w.output_weights.data.size(); ++i) w.output_weights.data[i] -= lr * g2.data[i];
    for (std::size_t j = 0; j < h; ++j) w.hidden_bias[j] -= lr * gb1[j];
    for (std::size_t k = 0; k < classes; ++k) w.output_bias[k] -= lr * gb2[k];
  }
  return MlpPredictor(std::move(w), OutputTarget::probs);
}

}  // namespace specrob
