#include <cmath>
#include <random>
#include <sstream>

#include "sfa/errors.hpp"
#include "sfa/kernels/kernels.hpp"
#include "sfa/lmi/transition.hpp"

namespace sfa {

namespace {

std::span<const double> view(const Matrix& M) { return {M.data(), static_cast<std::size_t>(M.size())}; }
std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Matrix inverse_sqrt(const Matrix& P) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

// One sample per row. Column-major storage of a count x n matrix is the
// coordinate-major layout the kernels expect.
Matrix sample_points(const Ellipsoid& e, std::size_t boundary, std::size_t interior, std::uint64_t seed) {
  const Eigen::Index n = e.dim();
  const std::size_t count = boundary + interior;
  const Matrix S = inverse_sqrt(e.P);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix pts(static_cast<Eigen::Index>(count), n);
  Vector d(n);
  for (std::size_t k = 0; k < count; ++k) {
    double norm = 0.0;
    while (norm < 1e-12) {
      for (Eigen::Index j = 0; j < n; ++j) d(j) = gauss(rng);
      norm = d.norm();
    }
    d /= norm;
    if (k >= boundary) d *= std::pow(unit(rng), 1.0 / static_cast<double>(n));
    pts.row(static_cast<Eigen::Index>(k)) = (e.c + S * d).transpose();
  }
  return pts;
}

}  // namespace

AuditReport audit_transition(const TransitionController& ctrl, const TransitionData& data, const CostModel& cost,
                             const AuditOptions& opt) {
  const Eigen::Index nx = data.mode.state_dim();
  const Eigen::Index nu = data.mode.input_dim();
  if (ctrl.K.rows() != nu || ctrl.K.cols() != nx || ctrl.l.size() != nu) {
    throw ContractError("audit_transition: controller shape does not match the mode");
  }
  const std::size_t count = opt.boundary_samples + opt.interior_samples;
  AuditReport rep;
  rep.samples = count;
  if (count == 0) return rep;

  const Matrix pts = sample_points(data.source, opt.boundary_samples, opt.interior_samples, opt.seed);
  const auto N = static_cast<Eigen::Index>(count);
  double worst_violation = 0.0;
  const auto violate = [&](double excess, Eigen::Index k, const std::string& what) {
    if (excess > opt.tol && excess > worst_violation) {
      worst_violation = excess;
      rep.passed = false;
      rep.witness = pts.row(k).transpose();
      std::ostringstream os;
      os << what << " exceeded by " << excess << " at x = [" << rep.witness.transpose() << "]";
      rep.failure = os.str();
    }
  };

  // kappa(x) for every sample.
  Matrix u(N, nu);
  const Matrix K = ctrl.K;
  kernels::affine_map(view(K), static_cast<std::size_t>(nu), static_cast<std::size_t>(nx), view(ctrl.c), view(ctrl.l),
                      view(pts), count, {u.data(), static_cast<std::size_t>(u.size())});

  const Matrix Acl = data.mode.A + data.mode.B * ctrl.K;
  const Vector base = data.mode.A * ctrl.c + data.mode.B * ctrl.l + data.mode.g;
  Matrix succ(N, nx);
  Vector q(N);
  rep.worst_membership = -1e300;
  for (const Vector& w : data.noise_vertices) {
    const Vector offset = base + w;
    kernels::affine_map(view(Acl), static_cast<std::size_t>(nx), static_cast<std::size_t>(nx), view(ctrl.c),
                        view(offset), view(pts), count, {succ.data(), static_cast<std::size_t>(succ.size())});
    kernels::quadratic_forms(view(data.target.P), static_cast<std::size_t>(nx), view(data.target.c), view(succ), count,
                             {q.data(), count});
    for (Eigen::Index k = 0; k < N; ++k) {
      rep.worst_membership = std::max(rep.worst_membership, q(k));
      violate(q(k) - 1.0, k, "target membership");
    }
  }

  const Vector zero_u = Vector::Zero(nu);
  rep.worst_input = 0.0;
  for (const Matrix& U : data.input_rows) {
    const Matrix G = U.transpose() * U;
    kernels::quadratic_forms(view(G), static_cast<std::size_t>(nu), view(zero_u), view(u), count, {q.data(), count});
    for (Eigen::Index k = 0; k < N; ++k) {
      const double norm = std::sqrt(std::max(0.0, q(k)));
      rep.worst_input = std::max(rep.worst_input, norm);
      violate(norm - 1.0, k, "input row");
    }
  }

  const Eigen::Index nz = nx + nu + 1;
  if (cost.Q.rows() != nz) throw ContractError("audit_transition: cost dimension mismatch");
  Matrix z(N, nz);
  z.leftCols(nx) = pts;
  z.middleCols(nx, nu) = u;
  z.col(nz - 1).setOnes();
  const Vector zero_z = Vector::Zero(nz);
  kernels::quadratic_forms(view(cost.Q), static_cast<std::size_t>(nz), view(zero_z), view(z), count, {q.data(), count});
  for (Eigen::Index k = 0; k < N; ++k) {
    rep.worst_cost_excess = std::max(rep.worst_cost_excess, q(k) - ctrl.cost_bound);
    violate(q(k) - ctrl.cost_bound, k, "cost bound");
  }
  return rep;
}

}  // namespace sfa
