#include <algorithm>
#include <cmath>

#include "sfa/abstraction/abstraction.hpp"
#include "sfa/errors.hpp"

namespace sfa {

CellCover build_cover(const Box& domain, double radius, std::size_t max_cells) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ContractError("build_cover: radius must be positive");
  const Eigen::Index n = domain.dim();
  if (n == 0) throw ContractError("build_cover: empty domain");
  const double nominal = 2.0 * radius / std::sqrt(static_cast<double>(n));

  CellCover cover;
  cover.domain = domain;
  cover.radius = radius;
  cover.spacing = Vector::Zero(n);
  double total = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double len = domain.upper(j) - domain.lower(j);
    const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil(len / nominal - 1e-9)));
    cover.counts.push_back(steps + 1);
    cover.spacing(j) = steps == 0 ? 0.0 : len / static_cast<double>(steps);
    total *= static_cast<double>(steps + 1);
  }
  if (total > static_cast<double>(max_cells)) {
    throw CapacityError("build_cover: " + std::to_string(static_cast<long long>(total)) + " cells exceed the cap of " +
                        std::to_string(max_cells));
  }

  const auto count = static_cast<std::size_t>(total);
  cover.cells.reserve(count);
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t id = 0; id < count; ++id) {
    Vector c(n);
    for (Eigen::Index j = 0; j < n; ++j) c(j) = domain.lower(j) + static_cast<double>(idx[j]) * cover.spacing(j);
    cover.cells.push_back(Ellipsoid::ball(c, radius));
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      if (++idx[j] < cover.counts[j]) break;
      idx[j] = 0;
    }
  }
  return cover;
}

void assign_modes(CellCover& cover, const PwaSystem& system) {
  cover.mode_of_cell.resize(cover.size());
  for (std::size_t i = 0; i < cover.size(); ++i) cover.mode_of_cell[i] = system.mode_of(cover.center(i));
}

double CellCover::grid_circumradius() const { return 0.5 * spacing.norm(); }

std::vector<std::size_t> CellCover::cells_containing(const Vector& x, double tol) const {
  const Eigen::Index n = domain.dim();
  if (x.size() != n) throw ContractError("cells_containing: dimension mismatch");
  const double reach = radius * std::sqrt(1.0 + tol);
  std::vector<std::size_t> lo(n), hi(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t last = counts[j] - 1;
    if (spacing(j) == 0.0) {
      lo[j] = 0;
      hi[j] = 0;
      continue;
    }
    const double a = std::ceil((x(j) - reach - domain.lower(j)) / spacing(j) - 1e-9);
    const double b = std::floor((x(j) + reach - domain.lower(j)) / spacing(j) + 1e-9);
    if (b < 0.0 || a > static_cast<double>(last)) return {};
    lo[j] = static_cast<std::size_t>(std::max(0.0, a));
    hi[j] = std::min(last, static_cast<std::size_t>(b));
    if (lo[j] > hi[j]) return {};
  }
  std::vector<std::size_t> out;
  std::vector<std::size_t> idx = lo;
  while (true) {
    std::size_t id = 0;
    for (Eigen::Index j = 0; j < n; ++j) id = id * counts[j] + idx[j];
    if (cells[id].contains(x, tol)) out.push_back(id);
    Eigen::Index j = n - 1;
    for (; j >= 0; --j) {
      if (++idx[j] <= hi[j]) break;
      idx[j] = lo[j];
    }
    if (j < 0) break;
  }
  return out;
}

double ball_radius(const Ellipsoid& cell) {
  const Eigen::Index n = cell.dim();
  const double p = cell.P(0, 0);
  if (!(p > 0.0) || (cell.P - p * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12 * p) {
    throw ContractError("cell is not a ball");
  }
  return 1.0 / std::sqrt(p);
}

Ball reach_overapprox(const Ellipsoid& cell, const AffineMode& mode, const Box& input_box, const Box& noise_box) {
  const double r = ball_radius(cell);
  Ball b;
  // Zero for symmetric noise; needed for noise boxes that are off-centre.
  b.center = mode.A * cell.c + mode.B * input_box.center() + mode.g + noise_box.center();
  b.radius = spectral_norm(mode.A) * r + spectral_norm(mode.B) * input_box.circumradius() + noise_box.circumradius();
  return b;
}

}  // namespace sfa
