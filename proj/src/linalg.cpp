#include "sfa/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sfa/errors.hpp"

namespace sfa {

double asymmetry(const Matrix& M) {
  if (M.rows() != M.cols()) return std::numeric_limits<double>::infinity();
  if (M.size() == 0) return 0.0;
  return (M - M.transpose()).cwiseAbs().maxCoeff();
}

void require_symmetric(const Matrix& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw ContractError(std::string(what) + ": matrix is not square");
  }
  if (M.size() == 0) return;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (asymmetry(M) > kSymmetryTol * scale) {
    throw ContractError(std::string(what) + ": matrix is not symmetric");
  }
}

double min_eigenvalue(const Matrix& M) {
  require_symmetric(M, "min_eigenvalue");
  if (M.size() == 0) return std::numeric_limits<double>::infinity();
  if (M.rows() == 1) return M(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_radius(const Matrix& M) {
  if (M.rows() != M.cols()) throw ContractError("spectral_radius: matrix is not square");
  if (M.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(M, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

Matrix spd_inverse(const Matrix& M, double max_condition) {
  require_symmetric(M, "spd_inverse");
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw AssemblyError("shape matrix is not positive definite");
  if (hi / lo > max_condition) {
    throw AssemblyError("shape matrix condition number " + std::to_string(hi / lo) +
                        " exceeds cap " + std::to_string(max_condition));
  }
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) throw AssemblyError("Cholesky factorization failed");
  Matrix inv = llt.solve(Matrix::Identity(M.rows(), M.cols()));
  return 0.5 * (inv + inv.transpose());
}

Matrix psd_factor(const Matrix& Q, double drop_below, double tol) {
  require_symmetric(Q, "psd_factor");
  const Eigen::Index n = Q.rows();
  if (n == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  Matrix L(n, n);
  Eigen::Index rank = 0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda < -tol * scale) throw ContractError("psd_factor: matrix is not positive semidefinite");
    if (lambda < drop_below) continue;
    L.row(rank++) = std::sqrt(lambda) * es.eigenvectors().col(i).transpose();
  }
  return L.topRows(rank);
}

Matrix expm(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) throw ContractError("expm: matrix is not square");
  const Eigen::Index n = M.rows();
  if (n == 0) return Matrix(0, 0);
  const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix X = M / std::ldexp(1.0, squarings);

  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k < 60; ++k) {
    term = term * X / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= tol * 1e-3 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

DiscreteModel discretize(const Matrix& Ac, const Matrix& Bc, double T, double tol) {
  if (Ac.rows() != Ac.cols() || Bc.rows() != Ac.rows()) {
    throw ContractError("discretize: dimension mismatch");
  }
  const Eigen::Index nx = Ac.rows();
  const Eigen::Index nu = Bc.cols();
  Matrix aug = Matrix::Zero(nx + nu, nx + nu);
  aug.topLeftCorner(nx, nx) = T * Ac;
  aug.topRightCorner(nx, nu) = T * Bc;
  const Matrix E = expm(aug, tol);
  return {E.topLeftCorner(nx, nx), E.topRightCorner(nx, nu)};
}

}  // namespace sfa
