#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "sfa/kernels/kernels.hpp"

using namespace sfa::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<Backend> simd_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * std::max(1.0, scale); }

}  // namespace

TEST_CASE("scalar reference kernels on hand-checked inputs") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, -5, 6};
  CHECK(scalar::dot(a.data(), b.data(), 3) == doctest::Approx(12.0));

  // M = [[1, 2], [3, 4]] column-major, two points (1, 0) and (0, 1), center 0, offset (1, 1).
  const std::vector<double> M{1, 3, 2, 4};
  const std::vector<double> pts{1, 0, 0, 1};  // x-coords then y-coords
  const std::vector<double> zero{0, 0};
  const std::vector<double> off{1, 1};
  std::vector<double> out(4);
  scalar::affine_map(M.data(), 2, 2, zero.data(), off.data(), pts.data(), 2, out.data());
  CHECK(out == std::vector<double>{2, 3, 4, 5});

  // P = diag(1, 4), point (1, 1) relative to center (0, 0) -> 5.
  const std::vector<double> P{1, 0, 0, 4};
  const std::vector<double> one{1, 1};
  double q = 0;
  scalar::quadratic_forms(P.data(), 2, zero.data(), one.data(), 1, &q);
  CHECK(q == doctest::Approx(5.0));
}

TEST_CASE("dispatch picks a supported backend and can be pinned") {
  CHECK(backend_available(active_backend()));
  force_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  reset_backend();
  CHECK(active_backend() == best_available_backend());
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (!backend_available(b)) CHECK_THROWS_AS(force_backend(b), std::invalid_argument);
  }
}

TEST_CASE("dispatching wrappers validate sizes") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(dot(a, b), std::invalid_argument);
  std::vector<double> P(4), c(2), pts(6), out(2);
  CHECK_THROWS_AS(quadratic_forms(P, 2, c, pts, 2, out), std::invalid_argument);
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
  const auto backends = simd_backends();
  if (backends.empty()) {
    MESSAGE("no SIMD backend on this CPU; equivalence test is vacuous");
    return;
  }
  std::mt19937_64 rng(20240611);
  for (Backend be : backends) {
    CAPTURE(backend_name(be));
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng() % 37;
      const auto a = random_vec(rng, n);
      const auto b = random_vec(rng, n);
      const double ref = scalar::dot(a.data(), b.data(), n);
      force_backend(be);
      const double got = dot(a, b);
      reset_backend();
      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(close(got, ref, mag));

      const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6, count = rng() % 23;
      const auto M = random_vec(rng, rows * cols);
      const auto ctr = random_vec(rng, cols);
      const auto off = random_vec(rng, rows);
      const auto in = random_vec(rng, cols * count);
      std::vector<double> ref_out(rows * count), got_out(rows * count);
      scalar::affine_map(M.data(), rows, cols, ctr.data(), off.data(), in.data(), count, ref_out.data());
      force_backend(be);
      affine_map(M, rows, cols, ctr, off, in, count, got_out);
      reset_backend();
      for (std::size_t i = 0; i < ref_out.size(); ++i) CHECK(close(got_out[i], ref_out[i], 100.0));

      const std::size_t qn = 1 + rng() % 6;
      auto Pm = random_vec(rng, qn * qn);
      for (std::size_t i = 0; i < qn; ++i)
        for (std::size_t j = 0; j < i; ++j) Pm[j * qn + i] = Pm[i * qn + j];
      const auto qc = random_vec(rng, qn);
      const auto qp = random_vec(rng, qn * count);
      std::vector<double> qref(count), qgot(count);
      scalar::quadratic_forms(Pm.data(), qn, qc.data(), qp.data(), count, qref.data());
      force_backend(be);
      quadratic_forms(Pm, qn, qc, qp, count, qgot);
      reset_backend();
      for (std::size_t i = 0; i < count; ++i) CHECK(close(qgot[i], qref[i], 1000.0));
    }
  }
}
