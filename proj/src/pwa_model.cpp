#include "sfa/pwa_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfa/errors.hpp"

namespace sfa {

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) throw ContractError("Box::contains: dimension mismatch");
  return ((x - lower).array() >= -tol).all() && ((upper - x).array() >= -tol).all();
}

bool Box::intersects_ball(const Vector& c, double r) const {
  const Vector nearest = c.cwiseMax(lower).cwiseMin(upper);
  return (nearest - c).norm() <= r;
}

bool Box::contains_ball(const Vector& c, double r) const {
  return ((c.array() - r) >= lower.array()).all() && ((c.array() + r) <= upper.array()).all();
}

Box Box::symmetric(const Vector& half_widths) { return Box{-half_widths, half_widths}; }

std::vector<Vector> box_vertices(const Box& box) {
  std::vector<Eigen::Index> free_axes;
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    if (box.upper(i) != box.lower(i)) free_axes.push_back(i);
  }
  if (free_axes.size() > static_cast<std::size_t>(kMaxNoiseDim)) {
    throw CapacityError("box has " + std::to_string(free_axes.size()) +
                        " non-degenerate axes; vertex enumeration is capped at " +
                        std::to_string(kMaxNoiseDim));
  }
  const std::size_t count = std::size_t{1} << free_axes.size();
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t v = 0; v < count; ++v) {
    Vector p = box.lower;
    for (std::size_t k = 0; k < free_axes.size(); ++k) {
      if (v & (std::size_t{1} << k)) p(free_axes[k]) = box.upper(free_axes[k]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

bool HalfSpace::holds(const Vector& x) const {
  const double v = x(axis);
  switch (op) {
    case Op::Le: return v <= bound;
    case Op::Lt: return v < bound;
    case Op::Ge: return v >= bound;
    case Op::Gt: return v > bound;
  }
  return false;
}

bool Region::contains(const Vector& x) const {
  return std::all_of(constraints.begin(), constraints.end(), [&](const HalfSpace& h) { return h.holds(x); });
}

CostModel CostModel::from_matrix(const Matrix& Q) {
  require_symmetric(Q, "cost matrix Q");
  CostModel c;
  c.Q = Q;
  c.L = psd_factor(Q, 1e-12, 1e-10);
  if ((c.L.transpose() * c.L - Q).cwiseAbs().maxCoeff() > 1e-8) {
    throw ContractError("cost matrix Q: factor does not reproduce Q within 1e-8");
  }
  return c;
}

double stage_cost(const CostModel& cost, const Vector& x, const Vector& u) {
  const Eigen::Index n = x.size() + u.size() + 1;
  if (cost.Q.rows() != n) throw ContractError("stage_cost: dimension mismatch");
  Vector z(n);
  z << x, u, 1.0;
  return z.dot(cost.Q * z);
}

PwaSystem::PwaSystem(std::vector<AffineMode> modes, std::vector<Region> partition, Box domain,
                     Box input_box, std::vector<Box> noise_boxes)
    : modes_(std::move(modes)),
      partition_(std::move(partition)),
      domain_(std::move(domain)),
      input_box_(std::move(input_box)),
      noise_boxes_(std::move(noise_boxes)) {
  const Eigen::Index nx = domain_.dim();
  const Eigen::Index nu = input_box_.dim();
  if (modes_.empty()) throw ContractError("PwaSystem: no modes");
  if (partition_.size() != modes_.size()) throw ContractError("PwaSystem: one partition region per mode required");
  if (noise_boxes_.size() != modes_.size()) throw ContractError("PwaSystem: one noise box per mode required");
  if (domain_.upper.size() != nx || (domain_.upper.array() < domain_.lower.array()).any()) {
    throw ContractError("PwaSystem: malformed domain box");
  }
  if (input_box_.upper.size() != nu || (input_box_.upper.array() < input_box_.lower.array()).any()) {
    throw ContractError("PwaSystem: malformed input box");
  }
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const AffineMode& m = modes_[i];
    const std::string tag = "PwaSystem: mode " + std::to_string(i);
    if (m.A.rows() != nx || m.A.cols() != nx) throw ContractError(tag + ": A must be n_x x n_x");
    if (m.B.rows() != nx || m.B.cols() != nu) throw ContractError(tag + ": B must be n_x x n_u");
    if (m.g.size() != nx) throw ContractError(tag + ": g must have n_x entries");
    if (!m.A.allFinite() || !m.B.allFinite() || !m.g.allFinite()) throw ContractError(tag + ": non-finite entries");
    const Box& w = noise_boxes_[i];
    if (w.dim() != nx || w.upper.size() != nx) throw ContractError(tag + ": noise dimension must equal n_x");
    if (!w.contains(Vector::Zero(nx))) throw ContractError(tag + ": noise box must contain the origin");
    for (const HalfSpace& h : partition_[i].constraints) {
      if (h.axis < 0 || h.axis >= nx) throw ContractError(tag + ": partition axis out of range");
    }
  }
}

std::size_t PwaSystem::mode_of(const Vector& x) const {
  if (x.size() != state_dim()) throw ContractError("mode_of: dimension mismatch");
  if (!domain_.contains(x)) throw DomainError("mode_of: state outside the domain");
  for (std::size_t i = 0; i < partition_.size(); ++i) {
    if (partition_[i].contains(x)) return i;
  }
  throw DomainError("mode_of: no partition region contains the state");
}

std::vector<Vector> PwaSystem::noise_vertices(std::size_t mode) const {
  if (state_dim() > kMaxNoiseDim) {
    throw CapacityError("noise vertex enumeration refused for n_x > " + std::to_string(kMaxNoiseDim));
  }
  return box_vertices(noise_boxes_.at(mode));
}

std::vector<Vector> PwaSystem::successor_vertices(const Vector& x, const Vector& u) const {
  return successor_vertices(mode_of(x), x, u);
}

std::vector<Vector> PwaSystem::successor_vertices(std::size_t mode, const Vector& x, const Vector& u) const {
  if (u.size() != input_dim()) throw ContractError("successor_vertices: input dimension mismatch");
  const Vector nominal = modes_.at(mode).nominal(x, u);
  std::vector<Vector> out = noise_vertices(mode);
  for (Vector& w : out) w += nominal;
  return out;
}

std::vector<Matrix> input_box_to_ellipsoid_rows(const Box& input_box) {
  const Eigen::Index nu = input_box.dim();
  std::vector<Matrix> rows;
  for (Eigen::Index j = 0; j < nu; ++j) {
    const double lo = input_box.lower(j);
    const double hi = input_box.upper(j);
    const double h = 0.5 * (hi - lo);
    if (!(h > 0.0)) throw DegenerateInputError("input box axis " + std::to_string(j) + " has zero half-width");
    if (std::abs(lo + hi) > 1e-12 * std::max(1.0, h)) {
      throw ContractError("input box must be centered at the origin");
    }
    Matrix U = Matrix::Zero(1, nu);
    U(0, j) = 1.0 / h;
    rows.push_back(std::move(U));
  }
  return rows;
}

}  // namespace sfa
