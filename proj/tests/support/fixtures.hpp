#pragma once

#include "sfa/lmi/transition.hpp"
#include "sfa/pwa_model.hpp"

namespace fixtures {

using sfa::Matrix;
using sfa::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// x+ = a x + b u + g + w on the real line, unit balls unless overridden.
inline sfa::TransitionData scalar_transition(double a, double b, double g = 0.0, double w = 0.0, double umax = 10.0,
                                             double c = 0.0, double r = 1.0, double c_plus = 0.0,
                                             double r_plus = 1.0) {
  sfa::TransitionData d;
  d.mode = sfa::AffineMode{scalar(a), scalar(b), Vector::Constant(1, g)};
  d.source = sfa::Ellipsoid::ball(Vector::Constant(1, c), r);
  d.target = sfa::Ellipsoid::ball(Vector::Constant(1, c_plus), r_plus);
  d.noise_vertices = sfa::box_vertices(sfa::Box::symmetric(Vector::Constant(1, w)));
  d.input_rows = sfa::input_box_to_ellipsoid_rows(sfa::Box::symmetric(Vector::Constant(1, umax)));
  return d;
}

// J = x^2 + u^2 for scalar x, u.
inline sfa::CostModel scalar_cost() {
  Matrix q = Matrix::Zero(3, 3);
  q(0, 0) = q(1, 1) = 1.0;
  return sfa::CostModel::from_matrix(q);
}

inline Matrix p0_matrix() {
  Matrix p(3, 3);
  p << 2.8106, 1.6583, 1.0143, 1.6583, 4.4629, 1.4071, 1.0143, 1.4071, 2.3453;
  return p;
}

// Third-order chain discretized with T = 0.5, |u| <= 10, source P = P0 / nu at
// the origin, target P+ = eta P0 / nu around (0.1, 0.5, 1.9).
inline sfa::TransitionData chain_transition(double nu, double eta, double omega_max) {
  Matrix Ac(3, 3);
  Ac << 0, 1, 0, 0, 0, 1, 1, -1, -1;
  Matrix Bc(3, 1);
  Bc << 0, 0, 1;
  const sfa::DiscreteModel dm = sfa::discretize(Ac, Bc, 0.5);
  sfa::TransitionData d;
  d.mode = sfa::AffineMode{dm.A, dm.B, Vector::Zero(3)};
  const Matrix P = p0_matrix() / nu;
  d.source = sfa::Ellipsoid{P, Vector::Zero(3)};
  d.target = sfa::Ellipsoid{eta * P, vec({0.1, 0.5, 1.9})};
  d.noise_vertices = sfa::box_vertices(sfa::Box::symmetric(Vector::Constant(3, omega_max)));
  d.input_rows = sfa::input_box_to_ellipsoid_rows(sfa::Box::symmetric(Vector::Constant(1, 10.0)));
  return d;
}

inline sfa::CostModel identity_cost(Eigen::Index nx, Eigen::Index nu) {
  Matrix q = Matrix::Zero(nx + nu + 1, nx + nu + 1);
  q.topLeftCorner(nx + nu, nx + nu).setIdentity();
  return sfa::CostModel::from_matrix(q);
}

}  // namespace fixtures
