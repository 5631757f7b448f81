#include "sfa/kernels/kernels.hpp"

namespace sfa::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void affine_map(const double* M, std::size_t rows, std::size_t cols,
                const double* center, const double* offset,
                const double* in, std::size_t count, double* out) {
  for (std::size_t k = 0; k < count; ++k) {
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
  for (std::size_t k = 0; k < count; ++k) {
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

}  // namespace sfa::kernels::scalar
