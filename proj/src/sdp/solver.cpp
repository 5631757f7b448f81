#include "sfa/sdp/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "sfa/errors.hpp"
#include "sfa/kernels/kernels.hpp"

namespace sfa::sdp {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using BlockMats = std::vector<Matrix>;

double frob(const Matrix& A, const Matrix& B) {
  const auto n = static_cast<std::size_t>(A.size());
  return kernels::dot(std::span<const double>(A.data(), n), std::span<const double>(B.data(), n));
}

Matrix sym(const Matrix& X) { return 0.5 * (X + X.transpose()); }

// Largest alpha with X + alpha dX still positive semidefinite; X positive definite.
double max_step(const Matrix& X, const Matrix& dX) {
  if (X.rows() == 1) return dX(0, 0) < 0.0 ? -X(0, 0) / dX(0, 0) : kInf;
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix half = llt.matrixL().solve(dX);
  const Matrix W = llt.matrixL().solve(Matrix(half.transpose()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(W), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo < 0.0 ? -1.0 / lo : kInf;
}

bool is_zero(const Matrix& M) { return M.size() == 0 || M.cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

InteriorPointSolver::InteriorPointSolver(const LinearSdp& problem, SdpTolerances tol)
    : problem_(problem), tol_(tol) {}

SdpSolution InteriorPointSolver::run() {
  if (used_) throw ContractError("InteriorPointSolver is single-use");
  used_ = true;
  problem_.validate();

  const LinearSdp& P = problem_;
  const auto m = static_cast<Eigen::Index>(P.num_vars);
  const std::size_t nb = P.blocks.size();
  const Vector& c = P.objective;

  SdpSolution sol;
  sol.y = Vector::Zero(m);

  // Sparsity: which variables enter which block.
  std::vector<std::vector<Eigen::Index>> active(nb);
  std::vector<bool> var_used(static_cast<std::size_t>(m), false);
  for (std::size_t b = 0; b < nb; ++b) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!is_zero(P.blocks[b].F[static_cast<std::size_t>(j)])) {
        active[b].push_back(j);
        var_used[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!var_used[static_cast<std::size_t>(j)] && c(j) != 0.0) {
      sol.message = "objective is unbounded along variable '" + P.var_names[static_cast<std::size_t>(j)] + "'";
      return sol;
    }
  }
  if (nb == 0) {
    sol.status = SdpStatus::Optimal;
    sol.min_eig_slack = kInf;
    return sol;
  }

  double n_total = 0.0;
  double norm_f0 = 0.0;
  double max_fj = 0.0;
  for (const auto& blk : P.blocks) {
    n_total += static_cast<double>(blk.dim());
    norm_f0 += blk.F0.squaredNorm();
    for (const auto& Fj : blk.F) max_fj = std::max(max_fj, Fj.norm());
  }
  norm_f0 = std::sqrt(norm_f0);
  const double norm_c = c.norm();

  double xi_z = std::max({10.0, std::sqrt(n_total)});
  for (Eigen::Index j = 0; j < m; ++j) {
    double fj = 0.0;
    for (const auto& blk : P.blocks) fj += blk.F[static_cast<std::size_t>(j)].squaredNorm();
    xi_z = std::max(xi_z, (1.0 + std::abs(c(j))) / (1.0 + std::sqrt(fj)));
  }
  const double xi_s = std::max({10.0, std::sqrt(n_total), norm_f0, max_fj});

  Vector y = Vector::Zero(m);
  BlockMats S(nb), Z(nb), Sinv(nb), rD(nb), ZrDSinv(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const Eigen::Index d = P.blocks[b].dim();
    S[b] = xi_s * Matrix::Identity(d, d);
    Z[b] = xi_z * Matrix::Identity(d, d);
  }

  Vector rP(m);
  double pobj = 0.0, dobj = 0.0;
  int stalls = 0;
  int iter = 0;
  double best_merit = kInf;
  int since_best = 0;
  Vector best_y = y;
  BlockMats best_Z = Z;
  bool converged = false;

  for (; iter < tol_.max_iterations; ++iter) {
    for (std::size_t b = 0; b < nb; ++b) {
      const Eigen::Index d = P.blocks[b].dim();
      Eigen::LLT<Matrix> llt(S[b]);
      if (llt.info() != Eigen::Success) {
        sol.message = "Cholesky of slack block '" + P.blocks[b].label + "' failed";
        break;
      }
      Sinv[b] = sym(llt.solve(Matrix::Identity(d, d)));
      rD[b] = P.blocks[b].F0 - S[b];
      for (Eigen::Index j : active[b]) rD[b] += y(j) * P.blocks[b].F[static_cast<std::size_t>(j)];
    }
    if (!sol.message.empty()) break;
    double zs = 0.0, rd_norm = 0.0, f0z = 0.0, z_norm = 0.0;
    rP = c;
    for (std::size_t b = 0; b < nb; ++b) {
      for (Eigen::Index j : active[b]) rP(j) -= frob(P.blocks[b].F[static_cast<std::size_t>(j)], Z[b]);
      zs += frob(Z[b], S[b]);
      rd_norm += rD[b].squaredNorm();
      f0z += frob(P.blocks[b].F0, Z[b]);
      z_norm += Z[b].squaredNorm();
    }
    rd_norm = std::sqrt(rd_norm);
    z_norm = std::sqrt(z_norm);
    pobj = c.dot(y);
    dobj = -f0z;
    const double mu = zs / n_total;
    const double scale = std::max(1.0, std::abs(pobj));
    const double rel_p = rP.norm() / (1.0 + norm_c);
    const double rel_d = rd_norm / (1.0 + norm_f0);
    const double rel_gap = std::abs(pobj - dobj) / scale;

    // Late iterations can lose accuracy once the Schur complement becomes
    // ill-conditioned, so the best iterate seen so far is kept.
    const double merit = std::max({rel_p, rel_d, rel_gap, zs / scale});
    if (merit < best_merit) {
      best_merit = merit;
      best_y = y;
      best_Z = Z;
      since_best = 0;
    } else if (++since_best >= 8) {
      sol.message = "no progress in 8 iterations";
      break;
    }
    if (rel_p <= 1e-10 && rel_d <= 1e-11 && zs / scale <= 1e-10 && rel_gap <= 1e-10) {
      converged = true;
      break;
    }
    if (!std::isfinite(mu) || z_norm > 1e10 * (1.0 + xi_z) || y.norm() > 1e10 * (1.0 + xi_s)) {
      sol.message = "iterates diverged";
      break;
    }

    // Schur complement M_ij = sum_b <F_i, Z F_j S^-1>.
    Matrix M = Matrix::Zero(m, m);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& F = P.blocks[b].F;
      for (Eigen::Index j : active[b]) {
        const Matrix G = Z[b] * F[static_cast<std::size_t>(j)] * Sinv[b];
        for (Eigen::Index i : active[b]) M(i, j) += frob(F[static_cast<std::size_t>(i)], G);
      }
      ZrDSinv[b] = Z[b] * rD[b] * Sinv[b];
    }
    M = sym(M);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!var_used[static_cast<std::size_t>(j)]) M(j, j) = 1.0;
    }
    Eigen::LLT<Matrix> mllt(M);
    if (mllt.info() != Eigen::Success) {
      const double reg = 1e-12 * (M.trace() / static_cast<double>(std::max<Eigen::Index>(m, 1)) + 1.0);
      mllt.compute(M + reg * Matrix::Identity(m, m));
      if (mllt.info() != Eigen::Success) {
        sol.message = "Schur complement is not positive definite";
        break;
      }
    }

    auto direction = [&](double target, const BlockMats* cor, Vector& dy, BlockMats& dS, BlockMats& dZ) {
      Vector rhs = -c;
      std::vector<Matrix> R(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        R[b] = target * Sinv[b] - ZrDSinv[b];
        if (cor) R[b] -= (*cor)[b];
        for (Eigen::Index i : active[b]) rhs(i) += frob(P.blocks[b].F[static_cast<std::size_t>(i)], R[b]);
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!var_used[static_cast<std::size_t>(j)]) rhs(j) = 0.0;
      }
      dy = mllt.solve(rhs);
      dS.resize(nb);
      dZ.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        dS[b] = rD[b];
        for (Eigen::Index j : active[b]) dS[b] += dy(j) * P.blocks[b].F[static_cast<std::size_t>(j)];
        dS[b] = sym(dS[b]);
        Matrix t = target * Sinv[b] - Z[b] - sym(Z[b] * dS[b] * Sinv[b]);
        if (cor) t -= sym((*cor)[b]);
        dZ[b] = t;
      }
    };
    auto step_limits = [&](const BlockMats& dS, const BlockMats& dZ) {
      double ap = kInf, ad = kInf;
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(Z[b], dZ[b]));
        ad = std::min(ad, max_step(S[b], dS[b]));
      }
      return std::pair{ap, ad};
    };

    Vector dy;
    BlockMats dS, dZ;
    direction(0.0, nullptr, dy, dS, dZ);
    auto [ap_aff, ad_aff] = step_limits(dS, dZ);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    double zs_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      zs_aff += frob(Matrix(Z[b] + ap_aff * dZ[b]), Matrix(S[b] + ad_aff * dS[b]));
    }
    const double sigma = std::clamp(std::pow(std::max(zs_aff, 0.0) / zs, 3.0), 0.0, 1.0);

    BlockMats cor(nb);
    for (std::size_t b = 0; b < nb; ++b) cor[b] = dZ[b] * dS[b] * Sinv[b];
    direction(sigma * mu, &cor, dy, dS, dZ);
    auto [ap, ad] = step_limits(dS, dZ);
    const double damp = 0.95;
    ap = std::min(1.0, damp * ap);
    ad = std::min(1.0, damp * ad);
    if (!std::isfinite(ap) || !std::isfinite(ad) || !dy.allFinite()) {
      sol.message = "non-finite search direction";
      break;
    }

    for (std::size_t b = 0; b < nb; ++b) {
      Z[b] = sym(Z[b] + ap * dZ[b]);
      S[b] = sym(S[b] + ad * dS[b]);
    }
    y += ad * dy;

    if (std::min(ap, ad) < 1e-8) {
      if (++stalls >= 3) {
        sol.message = "step length stalled";
        ++iter;
        break;
      }
    } else {
      stalls = 0;
    }
  }

  sol.iterations = iter;
  if (!converged) {
    y = best_y;
    Z = best_Z;
  }
  sol.y = y;
  sol.objective_value = c.dot(y);
  sol.min_eig_slack = P.min_eigenvalue_at(y);
  // Dual objective at the last iterate; it bounds the optimum once rP vanishes.
  double f0z = 0.0;
  rP = c;
  for (std::size_t b = 0; b < nb; ++b) {
    f0z += frob(P.blocks[b].F0, Z[b]);
    for (Eigen::Index j : active[b]) rP(j) -= frob(P.blocks[b].F[static_cast<std::size_t>(j)], Z[b]);
  }
  dobj = -f0z;
  sol.duality_gap = sol.objective_value - dobj;

  const double scale = std::max(1.0, std::abs(sol.objective_value));
  const bool dual_ok = rP.norm() / (1.0 + norm_c) <= 1e-6;
  const bool feasible = sol.min_eig_slack >= -tol_.feas_tol;
  const bool gap_ok = std::abs(sol.duality_gap) <= tol_.gap_tol * scale;
  if (feasible && gap_ok && dual_ok && sol.y.allFinite()) {
    sol.status = SdpStatus::Optimal;
    if (!converged) sol.message = "accepted best iterate" + (sol.message.empty() ? std::string() : " after: " + sol.message);
  } else if (sol.message.empty()) {
    sol.message = converged ? "converged iterate failed the feasibility recheck" : "iteration cap reached";
  }
  return sol;
}

FeasibilityMargin feasibility_margin(const LinearSdp& problem, const SdpTolerances& tol) {
  problem.validate();
  FeasibilityMargin out;
  double f0_max = 0.0;
  for (const auto& b : problem.blocks) f0_max = std::max(f0_max, b.F0.cwiseAbs().maxCoeff());
  const double cap = 1e4 * std::max(1.0, f0_max);

  if (problem.blocks.empty()) {
    out.status = SdpStatus::Optimal;
    out.margin = cap;
    out.y = Vector::Zero(static_cast<Eigen::Index>(problem.num_vars));
    return out;
  }

  const std::size_t m = problem.num_vars;
  LinearSdp aug(m + 1);
  for (std::size_t j = 0; j < m; ++j) aug.var_names[j] = problem.var_names[j];
  aug.var_names[m] = "t";
  aug.objective(static_cast<Eigen::Index>(m)) = -1.0;
  for (const auto& blk : problem.blocks) {
    const std::size_t b = aug.add_block(blk.F0, blk.label);
    for (std::size_t j = 0; j < m; ++j) aug.coefficient(b, j) = blk.F[j];
    aug.coefficient(b, m) = -Matrix::Identity(blk.dim(), blk.dim());
  }
  const std::size_t cap_block = aug.add_block(Matrix::Constant(1, 1, cap), "t<=cap");
  aug.coefficient(cap_block, m)(0, 0) = -1.0;

  InteriorPointSolver solver(aug, tol);
  const SdpSolution s = solver.run();
  out.iterations = s.iterations;
  out.message = s.message;
  if (s.status != SdpStatus::Optimal) {
    out.status = SdpStatus::NumericalFailure;
    return out;
  }
  out.status = SdpStatus::Optimal;
  out.y = s.y.head(static_cast<Eigen::Index>(m));
  out.margin = s.y(static_cast<Eigen::Index>(m));
  return out;
}

SdpSolution solve(const LinearSdp& problem, const SdpTolerances& tol) {
  InteriorPointSolver solver(problem, tol);
  SdpSolution sol = solver.run();
  if (sol.status == SdpStatus::Optimal) return sol;

  const FeasibilityMargin fm = feasibility_margin(problem, tol);
  if (fm.status == SdpStatus::Optimal && fm.margin < -tol.infeasible_margin) {
    sol.status = SdpStatus::Infeasible;
    sol.y = fm.y;
    sol.min_eig_slack = fm.margin;
    sol.message = "phase-1 margin " + std::to_string(fm.margin) + " certifies infeasibility";
  } else {
    sol.status = SdpStatus::NumericalFailure;
    sol.message += fm.status == SdpStatus::Optimal
                       ? " (phase-1 margin " + std::to_string(fm.margin) + ")"
                       : " (phase-1 failed: " + fm.message + ")";
  }
  return sol;
}

}  // namespace sfa::sdp
