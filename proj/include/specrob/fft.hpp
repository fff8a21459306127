#pragma once

// Unnormalized complex FFT of arbitrary length: iterative radix-2 for powers
// of two, Bluestein's chirp-z reduction otherwise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace specrob::fft {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// exp(-2*pi*i*k/n) evaluated from the reduced fraction k/n so that large
// indices do not lose precision.
inline cplx unit_root(std::size_t k, std::size_t n) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(k % n) /
                       static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

class Radix2Plan {
 public:
  explicit Radix2Plan(std::size_t n) : n_(n), twiddle_(n / 2), bitrev_(n) {
    for (std::size_t k = 0; k < n / 2; ++k) twiddle_[k] = unit_root(k, n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bitrev_[i] = r;
    }
  }

  void execute(std::span<cplx> data, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
    }
    double* d = reinterpret_cast<double*>(data.data());
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t k = 0; k < half; ++k) {
        const double wr = twiddle_[k * stride].real();
        const double wi = inverse ? -twiddle_[k * stride].imag() : twiddle_[k * stride].imag();
        for (std::size_t start = k; start < n_; start += len) {
          double* a = d + 2 * start;
          double* b = d + 2 * (start + half);
          const double br = b[0] * wr - b[1] * wi;
          const double bi = b[0] * wi + b[1] * wr;
          b[0] = a[0] - br;
          b[1] = a[1] - bi;
          a[0] += br;
          a[1] += bi;
        }
      }
    }
  }

  // Transforms every column of a row-major n x cols block at once.
  void execute_columns(std::span<cplx> data, std::size_t cols, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < bitrev_[i]) {
        std::swap_ranges(data.begin() + static_cast<long>(i * cols), data.begin() + static_cast<long>((i + 1) * cols),
                         data.begin() + static_cast<long>(bitrev_[i] * cols));
      }
    }
    double* d = reinterpret_cast<double*>(data.data());
    const std::size_t row = 2 * cols;
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t k = 0; k < half; ++k) {
        const double wr = twiddle_[k * stride].real();
        const double wi = inverse ? -twiddle_[k * stride].imag() : twiddle_[k * stride].imag();
        for (std::size_t start = k; start < n_; start += len) {
          double* a = d + start * row;
          double* b = d + (start + half) * row;
          for (std::size_t c = 0; c < row; c += 2) {
            const double br = b[c] * wr - b[c + 1] * wi;
            const double bi = b[c] * wi + b[c + 1] * wr;
            b[c] = a[c] - br;
            b[c + 1] = a[c + 1] - bi;
            a[c] += br;
            a[c + 1] += bi;
          }
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<cplx> twiddle_;
  std::vector<std::size_t> bitrev_;
};

class BluesteinPlan {
 public:
  explicit BluesteinPlan(std::size_t n)
      : n_(n), m_(next_power_of_two(2 * n - 1)), inner_(m_), chirp_(n),
        kernel_(m_), inverse_kernel_(m_) {
    // chirp_k = exp(-i*pi*k^2/n); k^2 is reduced mod 2n before scaling.
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t k2 = (k * k) % (2 * n);
      const double angle = -std::numbers::pi * static_cast<double>(k2) /
                           static_cast<double>(n);
      chirp_[k] = {std::cos(angle), std::sin(angle)};
    }
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel_[k] = std::conj(chirp_[k]);
      kernel_[m_ - k] = std::conj(chirp_[k]);
    }
    inner_.execute(kernel_, false);
    // The inverse chirp kernel is the conjugate sequence, whose spectrum is
    // the index-reversed conjugate of the forward kernel spectrum.
    for (std::size_t k = 0; k < m_; ++k) {
      inverse_kernel_[k] = std::conj(kernel_[(m_ - k) % m_]);
    }
  }

  void execute(std::span<cplx> data, bool inverse) const {
    std::vector<cplx> work(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const cplx c = inverse ? std::conj(chirp_[k]) : chirp_[k];
      work[k] = data[k] * c;
    }
    inner_.execute(work, false);
    for (std::size_t k = 0; k < m_; ++k) {
      work[k] *= inverse ? inverse_kernel_[k] : kernel_[k];
    }
    inner_.execute(work, true);
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const cplx c = inverse ? std::conj(chirp_[k]) : chirp_[k];
      data[k] = work[k] * scale * c;
    }
  }

 private:
  std::size_t n_;
  std::size_t m_;
  Radix2Plan inner_;
  std::vector<cplx> chirp_;
  std::vector<cplx> kernel_;
  std::vector<cplx> inverse_kernel_;
};

// Plans are immutable after construction and cached per thread by length.
class Plan {
 public:
  explicit Plan(std::size_t n) : n_(n) {
    if (is_power_of_two(n)) {
      radix2_ = std::make_unique<Radix2Plan>(n);
    } else {
      bluestein_ = std::make_unique<BluesteinPlan>(n);
    }
  }

  std::size_t size() const { return n_; }
  const Radix2Plan* radix2() const { return radix2_.get(); }

  void execute(std::span<cplx> data, bool inverse) const {
    if (n_ <= 1) return;
    if (radix2_) {
      radix2_->execute(data, inverse);
    } else {
      bluestein_->execute(data, inverse);
    }
  }

 private:
  std::size_t n_;
  std::unique_ptr<Radix2Plan> radix2_;
  std::unique_ptr<BluesteinPlan> bluestein_;
};

inline const Plan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

// In-place unnormalized transform: forward uses exp(-2*pi*i*jk/n), inverse
// uses exp(+2*pi*i*jk/n) without the 1/n factor.
inline void transform(std::span<cplx> data, bool inverse = false) {
  plan_for(data.size()).execute(data, inverse);
}

// In-place unnormalized 2D transform of a row-major rows x cols plane.
inline void transform_2d(std::span<cplx> plane, std::size_t rows,
                         std::size_t cols, bool inverse = false) {
  const Plan& row_plan = plan_for(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    row_plan.execute(plane.subspan(r * cols, cols), inverse);
  }
  if (const Radix2Plan* col_plan = plan_for(rows).radix2()) {
    col_plan->execute_columns(plane, cols, inverse);
    return;
  }
  std::vector<cplx> column(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = plane[r * cols + c];
    transform(column, inverse);
    for (std::size_t r = 0; r < rows; ++r) plane[r * cols + c] = column[r];
  }
}

}  // namespace specrob::fft
