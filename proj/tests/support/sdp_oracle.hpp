#pragma once

// Test-only generators and a grid-search oracle for tiny SDPs. The oracle never
// calls the interior-point code; it only evaluates min eigenvalues.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "sfa/linalg.hpp"
#include "sfa/sdp/linear_sdp.hpp"

namespace sfa::testing {

inline Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) M(i, j) = M(j, i) = g(rng);
  return M;
}

// Random 1- or 2-variable problem inside the box |y_j| <= box, strictly
// feasible at a random interior point with eigenvalue margin >= 0.1.
inline sdp::LinearSdp random_small_sdp(std::mt19937_64& rng, std::size_t vars, double box = 2.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  sdp::LinearSdp p(vars);
  Vector anchor(static_cast<Eigen::Index>(vars));
  for (Eigen::Index j = 0; j < anchor.size(); ++j) anchor(j) = 0.8 * box * u(rng);
  Vector c(static_cast<Eigen::Index>(vars));
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = u(rng);
  if (c.norm() < 0.1) c(0) = 1.0;
  p.objective = c / c.norm();

  const int blocks = 1 + static_cast<int>(rng() % 2);
  for (int b = 0; b < blocks; ++b) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 2);
    Matrix base = random_symmetric(rng, d);
    base = base * base.transpose() / static_cast<double>(d) + 0.1 * Matrix::Identity(d, d);
    Matrix F0 = base;
    std::vector<Matrix> F;
    for (std::size_t j = 0; j < vars; ++j) {
      F.push_back(random_symmetric(rng, d));
      F0 -= anchor(static_cast<Eigen::Index>(j)) * F.back();
    }
    const std::size_t bi = p.add_block(F0, "rand" + std::to_string(b));
    for (std::size_t j = 0; j < vars; ++j) p.coefficient(bi, j) = F[j];
  }
  for (std::size_t j = 0; j < vars; ++j) {
    const std::size_t lo = p.add_block(Matrix::Constant(1, 1, box), "lo");
    p.coefficient(lo, j)(0, 0) = 1.0;
    const std::size_t hi = p.add_block(Matrix::Constant(1, 1, box), "hi");
    p.coefficient(hi, j)(0, 0) = -1.0;
  }
  return p;
}

struct GridResult {
  bool feasible = false;
  double best = std::numeric_limits<double>::infinity();
  Vector argbest;
};

// Dense grid over the box, then a sequence of finer 41-point grids (4x finer
// each level) recentered on the best feasible point until the spacing drops
// below `min_step`. Returns the best feasible objective found.
inline GridResult grid_search(const sdp::LinearSdp& p, double box = 2.0, int coarse_points = 201,
                              double min_step = 1e-6) {
  const auto m = static_cast<Eigen::Index>(p.num_vars);
  GridResult r;
  Vector center = Vector::Zero(m);
  double half = box;
  int points = coarse_points;
  double h = 2.0 * half / (points - 1);
  for (int level = 0; h >= min_step; ++level) {
    for (int pass = 0; pass < (level == 0 ? 1 : 50); ++pass) {
      bool improved = false;
      Vector y(m);
      const int n2 = m == 2 ? points : 1;
      for (int a = 0; a < points; ++a) {
        for (int b = 0; b < n2; ++b) {
          y(0) = center(0) - half + a * h;
          if (m == 2) y(1) = center(1) - half + b * h;
          if ((y.array().abs() > box + 1e-12).any()) continue;
          const double f = p.objective.dot(y);
          if (f >= r.best) continue;
          if (p.min_eigenvalue_at(y) >= 0.0) {
            r.best = f;
            r.argbest = y;
            r.feasible = true;
            improved = true;
          }
        }
      }
      if (!r.feasible) return r;
      center = r.argbest;
      if (level == 0 || !improved) break;
    }
    half = 5.0 * h;
    points = 41;
    h = 2.0 * half / (points - 1);
  }
  return r;
}

}  // namespace sfa::testing
