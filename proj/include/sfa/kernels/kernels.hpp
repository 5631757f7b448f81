#pragma once

// Data-parallel inner loops shared by the SDP solver, the transition audit
// and the cover checks. Every kernel has a scalar reference implementation;
// SIMD variants (AVX2+FMA on x86-64, NEON on AArch64) are selected at runtime
// and must agree with the reference to rounding.
//
// Matrices are column-major (Eigen's default). Point batches are stored
// coordinate-major: coordinate j of point k lives at data[j * count + k],
// so one SIMD lane handles one point.

#include <cstddef>
#include <span>
#include <string_view>

namespace sfa::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

// Best backend the running CPU supports.
Backend best_available_backend();
bool backend_available(Backend b);

Backend active_backend();
// Pins the dispatch to `b` (tests and benchmarks). Throws std::invalid_argument
// when the CPU cannot run it.
void force_backend(Backend b);
void reset_backend();

// sum_i a[i] * b[i]. Also the Frobenius product of two equally shaped matrices.
double dot(std::span<const double> a, std::span<const double> b);

// out_k = M (x_k - center) + offset for every point x_k.
// M is rows x cols column-major; points_in has `cols` coordinates, out has `rows`.
void affine_map(std::span<const double> M, std::size_t rows, std::size_t cols,
                std::span<const double> center, std::span<const double> offset,
                std::span<const double> points_in, std::size_t count,
                std::span<double> points_out);

// out_k = (x_k - center)^T P (x_k - center) with P symmetric n x n.
void quadratic_forms(std::span<const double> P, std::size_t n,
                     std::span<const double> center,
                     std::span<const double> points, std::size_t count,
                     std::span<double> out);

// Per-backend entry points; the dispatching functions above forward here.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void affine_map(const double* M, std::size_t rows, std::size_t cols,
                const double* center, const double* offset,
                const double* in, std::size_t count, double* out);
void quadratic_forms(const double* P, std::size_t n, const double* center,
                     const double* points, std::size_t count, double* out);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void affine_map(const double* M, std::size_t rows, std::size_t cols,
                const double* center, const double* offset,
                const double* in, std::size_t count, double* out);
void quadratic_forms(const double* P, std::size_t n, const double* center,
                     const double* points, std::size_t count, double* out);
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void affine_map(const double* M, std::size_t rows, std::size_t cols,
                const double* center, const double* offset,
                const double* in, std::size_t count, double* out);
void quadratic_forms(const double* P, std::size_t n, const double* center,
                     const double* points, std::size_t count, double* out);
}  // namespace neon

}  // namespace sfa::kernels
