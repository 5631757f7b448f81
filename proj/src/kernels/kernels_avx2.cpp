// Compiled with -mavx2 -mfma. Only reached through dispatch after a CPUID check.

#include <immintrin.h>

#include "sfa/kernels/kernels.hpp"

namespace sfa::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void affine_map(const double* M, std::size_t rows, std::size_t cols,
                const double* center, const double* offset,
                const double* in, std::size_t count, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    for (std::size_t r = 0; r < rows; ++r) {
      __m256d acc = _mm256_set1_pd(offset[r]);
      for (std::size_t c = 0; c < cols; ++c) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(in + c * count + k),
                                        _mm256_set1_pd(center[c]));
        acc = _mm256_fmadd_pd(_mm256_set1_pd(M[c * rows + r]), d, acc);
      }
      _mm256_storeu_pd(out + r * count + k, acc);
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
  for (; k + 4 <= count; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d di = _mm256_sub_pd(_mm256_loadu_pd(points + i * count + k),
                                       _mm256_set1_pd(center[i]));
      __m256d row = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        const __m256d dj = _mm256_sub_pd(_mm256_loadu_pd(points + j * count + k),
                                         _mm256_set1_pd(center[j]));
        row = _mm256_fmadd_pd(_mm256_set1_pd(P[j * n + i]), dj, row);
      }
      acc = _mm256_fmadd_pd(di, row, acc);
    }
    _mm256_storeu_pd(out + k, acc);
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

}  // namespace sfa::kernels::avx2
