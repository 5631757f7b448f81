#pragma once

#include <Eigen/Dense>

namespace sfa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSymmetryTol = 1e-12;

// Largest absolute entry of M - M^T.
double asymmetry(const Matrix& M);

// Throws ContractError when M is not square or asymmetry(M) exceeds
// kSymmetryTol * max(1, max|M_ij|).
void require_symmetric(const Matrix& M, const char* what);

// Smallest eigenvalue of a symmetric matrix. Empty matrices have no
// eigenvalues and return +infinity.
double min_eigenvalue(const Matrix& M);

// Largest eigenvalue modulus of a general square matrix.
double spectral_radius(const Matrix& M);

// Spectral norm ||M||_2.
double spectral_norm(const Matrix& M);

// Inverse of a symmetric positive definite matrix through its Cholesky factor.
// Throws AssemblyError if M is not positive definite or its 2-norm condition
// number exceeds max_condition. The result is symmetrized exactly.
Matrix spd_inverse(const Matrix& M, double max_condition);

// Factor L (rank x n) with L^T L = Q for symmetric PSD Q. Eigenvalues below
// `drop_below` are zeroed and their rows removed; a negative eigenvalue below
// -tol * max(1, ||Q||) throws ContractError.
Matrix psd_factor(const Matrix& Q, double drop_below = 1e-12, double tol = 1e-10);

// exp(M) by scaling and squaring with a Taylor series truncated once terms
// drop under `tol` relative to the running sum.
Matrix expm(const Matrix& M, double tol = 1e-12);

struct DiscreteModel {
  Matrix A;  // exp(T Ac)
  Matrix B;  // int_0^T exp(t Ac) Bc dt
};

// Zero-order-hold discretization through the augmented exponential
// exp(T [[Ac, Bc], [0, 0]]) = [[A, B], [0, I]].
DiscreteModel discretize(const Matrix& Ac, const Matrix& Bc, double T, double tol = 1e-12);

}  // namespace sfa
