// AArch64 only; NEON is part of the base ISA there.

#include <arm_neon.h>

#include "sfa/kernels/kernels.hpp"

namespace sfa::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void affine_map(const double* M, std::size_t rows, std::size_t cols,
                const double* center, const double* offset,
                const double* in, std::size_t count, double* out) {
  std::size_t k = 0;
  for (; k + 2 <= count; k += 2) {
    for (std::size_t r = 0; r < rows; ++r) {
      float64x2_t acc = vdupq_n_f64(offset[r]);
      for (std::size_t c = 0; c < cols; ++c) {
        const float64x2_t d = vsubq_f64(vld1q_f64(in + c * count + k), vdupq_n_f64(center[c]));
        acc = vfmaq_f64(acc, vdupq_n_f64(M[c * rows + r]), d);
      }
      vst1q_f64(out + r * count + k, acc);
    }
  }
  for (; k < count; ++k) {
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = offset[r];
      for (std::size_t c = 0; c < cols; ++c) {
        acc += M[c * rows + r] * (in[c * count + k] - center[c]);
      }
      out[r * count + k] = acc;
    }
  }
}

void quadratic_forms(const double* P, std::size_t n, const double* center,
                     const double* points, std::size_t count, double* out) {
  std::size_t k = 0;
  for (; k + 2 <= count; k += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const float64x2_t di = vsubq_f64(vld1q_f64(points + i * count + k), vdupq_n_f64(center[i]));
      float64x2_t row = vdupq_n_f64(0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const float64x2_t dj = vsubq_f64(vld1q_f64(points + j * count + k), vdupq_n_f64(center[j]));
        row = vfmaq_f64(row, vdupq_n_f64(P[j * n + i]), dj);
      }
      acc = vfmaq_f64(acc, di, row);
    }
    vst1q_f64(out + k, acc);
  }
  for (; k < count; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double di = points[i * count + k] - center[i];
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row += P[j * n + i] * (points[j * count + k] - center[j]);
      }
      acc += di * row;
    }
    out[k] = acc;
  }
}

}  // namespace sfa::kernels::neon
