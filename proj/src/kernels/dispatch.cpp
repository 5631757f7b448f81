#include <atomic>
#include <stdexcept>
#include <string>

#include "sfa/kernels/kernels.hpp"

namespace sfa::kernels {

namespace {

constexpr int kAuto = -1;
std::atomic<int> g_forced{kAuto};

bool cpu_has_avx2() {
#if defined(SFA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return has;
#else
  return false;
#endif
}

bool cpu_has_neon() {
#if defined(SFA_HAVE_NEON)
  return true;
#else
  return false;
#endif
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("kernels: ") + what);
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
    case Backend::Neon: return cpu_has_neon();
  }
  return false;
}

Backend best_available_backend() {
  if (cpu_has_avx2()) return Backend::Avx2;
  if (cpu_has_neon()) return Backend::Neon;
  return Backend::Scalar;
}

Backend active_backend() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced != kAuto) return static_cast<Backend>(forced);
  static const Backend best = best_available_backend();
  return best;
}

void force_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument("kernels: backend '" + std::string(backend_name(b)) +
                                "' is not supported on this CPU");
  }
  g_forced.store(static_cast<int>(b), std::memory_order_relaxed);
}

void reset_backend() { g_forced.store(kAuto, std::memory_order_relaxed); }

// The SIMD namespaces are declared for every platform but only defined where
// their translation unit is compiled; the #if guards keep unresolved symbols
// out of the link.

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  switch (active_backend()) {
#if defined(SFA_HAVE_AVX2)
    case Backend::Avx2: return avx2::dot(a.data(), b.data(), a.size());
#endif
#if defined(SFA_HAVE_NEON)
    case Backend::Neon: return neon::dot(a.data(), b.data(), a.size());
#endif
    default: return scalar::dot(a.data(), b.data(), a.size());
  }
}

void affine_map(std::span<const double> M, std::size_t rows, std::size_t cols,
                std::span<const double> center, std::span<const double> offset,
                std::span<const double> points_in, std::size_t count,
                std::span<double> points_out) {
  require(M.size() == rows * cols, "affine_map: matrix size");
  require(center.size() == cols, "affine_map: center size");
  require(offset.size() == rows, "affine_map: offset size");
  require(points_in.size() == cols * count, "affine_map: input size");
  require(points_out.size() == rows * count, "affine_map: output size");
  switch (active_backend()) {
#if defined(SFA_HAVE_AVX2)
    case Backend::Avx2:
      avx2::affine_map(M.data(), rows, cols, center.data(), offset.data(), points_in.data(), count,
                       points_out.data());
      return;
#endif
#if defined(SFA_HAVE_NEON)
    case Backend::Neon:
      neon::affine_map(M.data(), rows, cols, center.data(), offset.data(), points_in.data(), count,
                       points_out.data());
      return;
#endif
    default:
      scalar::affine_map(M.data(), rows, cols, center.data(), offset.data(), points_in.data(),
                         count, points_out.data());
  }
}

void quadratic_forms(std::span<const double> P, std::size_t n, std::span<const double> center,
                     std::span<const double> points, std::size_t count, std::span<double> out) {
  require(P.size() == n * n, "quadratic_forms: matrix size");
  require(center.size() == n, "quadratic_forms: center size");
  require(points.size() == n * count, "quadratic_forms: input size");
  require(out.size() == count, "quadratic_forms: output size");
  switch (active_backend()) {
#if defined(SFA_HAVE_AVX2)
    case Backend::Avx2:
      avx2::quadratic_forms(P.data(), n, center.data(), points.data(), count, out.data());
      return;
#endif
#if defined(SFA_HAVE_NEON)
    case Backend::Neon:
      neon::quadratic_forms(P.data(), n, center.data(), points.data(), count, out.data());
      return;
#endif
    default:
      scalar::quadratic_forms(P.data(), n, center.data(), points.data(), count, out.data());
  }
}

}  // namespace sfa::kernels
