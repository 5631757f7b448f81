#pragma once

#include <cstddef>
#include <vector>

#include "sfa/linalg.hpp"

namespace sfa {

inline constexpr int kMaxNoiseDim = 6;

// Axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  Eigen::Index dim() const { return lower.size(); }
  Vector center() const { return 0.5 * (lower + upper); }
  Vector half_widths() const { return 0.5 * (upper - lower); }
  // Radius of the smallest ball around center() containing the box.
  double circumradius() const { return half_widths().norm(); }
  bool contains(const Vector& x, double tol = 0.0) const;
  // True if the closed ball B(c, r) meets the box.
  bool intersects_ball(const Vector& c, double r) const;
  // True if the closed ball B(c, r) lies inside the box.
  bool contains_ball(const Vector& c, double r) const;

  static Box symmetric(const Vector& half_widths);
};

// Vertices of a box; axes with zero width contribute one coordinate instead of two.
std::vector<Vector> box_vertices(const Box& box);

struct HalfSpace {
  enum class Op { Le, Lt, Ge, Gt };
  Eigen::Index axis = 0;
  Op op = Op::Le;
  double bound = 0.0;

  bool holds(const Vector& x) const;
};

// Conjunction of half-spaces; an empty list is the whole space.
struct Region {
  std::vector<HalfSpace> constraints;
  bool contains(const Vector& x) const;
};

// Nominal dynamics x+ = A x + B u + g of one part of the partition.
struct AffineMode {
  Matrix A;
  Matrix B;
  Vector g;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Vector nominal(const Vector& x, const Vector& u) const { return A * x + B * u + g; }
};

// Stage cost J(x, u) = [x; u; 1]^T Q [x; u; 1] with Q = L^T L.
struct CostModel {
  Matrix Q;
  Matrix L;

  // Validates Q (symmetric PSD) and factors it by symmetric eigendecomposition.
  static CostModel from_matrix(const Matrix& Q);
};

double stage_cost(const CostModel& cost, const Vector& x, const Vector& u);

class PwaSystem {
 public:
  // noise_boxes holds one box per mode. Throws ContractError on inconsistent
  // dimensions, a noise box without the origin, or a partition/mode count mismatch.
  PwaSystem(std::vector<AffineMode> modes, std::vector<Region> partition, Box domain, Box input_box,
            std::vector<Box> noise_boxes);

  Eigen::Index state_dim() const { return domain_.dim(); }
  Eigen::Index input_dim() const { return input_box_.dim(); }
  std::size_t num_modes() const { return modes_.size(); }

  const AffineMode& mode(std::size_t i) const { return modes_.at(i); }
  const Region& region(std::size_t i) const { return partition_.at(i); }
  const Box& domain() const { return domain_; }
  const Box& input_box() const { return input_box_; }
  const Box& noise_box(std::size_t i) const { return noise_boxes_.at(i); }

  // Index of the first region containing x (lowest index wins on shared
  // boundaries). DomainError if x is outside the domain or no region holds it.
  std::size_t mode_of(const Vector& x) const;

  // Noise box vertices of mode i (at most 2^6). CapacityError above that.
  std::vector<Vector> noise_vertices(std::size_t mode) const;

  // A x + B u + g + w_v over the noise vertices of mode_of(x); the successor
  // set is their convex hull.
  std::vector<Vector> successor_vertices(const Vector& x, const Vector& u) const;
  std::vector<Vector> successor_vertices(std::size_t mode, const Vector& x, const Vector& u) const;

 private:
  std::vector<AffineMode> modes_;
  std::vector<Region> partition_;
  Box domain_;
  Box input_box_;
  std::vector<Box> noise_boxes_;
};

// Rows U_j = e_j^T / h_j so that ||U_j u|| <= 1 for all j iff u is in the box.
// The box must be centered at the origin (ContractError otherwise); a zero
// half-width throws DegenerateInputError.
std::vector<Matrix> input_box_to_ellipsoid_rows(const Box& input_box);

}  // namespace sfa
