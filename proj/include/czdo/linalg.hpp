#pragma once

#include <optional>

#include <Eigen/Dense>

namespace czdo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-9;

namespace linalg {

/// Kronecker product, (r_A r_B) x (c_A c_B).
Matrix kron(const Matrix& a, const Matrix& b);

/// Numerical rank: number of singular values above tol * sigma_max.
/// The all-zero and empty matrices have rank 0.
int rank(const Matrix& a, double tol = kDefaultRankTol);

/// True iff every row of b lies in the row space of a (XA = B solvable).
bool row_space_contains(const Matrix& a, const Matrix& b, double tol = kDefaultRankTol);

/// Minimal-Frobenius-norm X with XA = B. Returns nullopt when the residual
/// ||XA - B|| exceeds tol * (1 + ||B||).
std::optional<Matrix> solve_left(const Matrix& a, const Matrix& b, double tol = kDefaultRankTol);

/// Stacked [C; CA; ...; CA^(blocks-1)].
Matrix observability_matrix(const Matrix& a, const Matrix& c, int blocks);

/// Smallest k >= 1 at which the rank of the k-block observability matrix
/// reaches its Cayley-Hamilton limit.
int observability_index(const Matrix& a, const Matrix& c, double tol = kDefaultRankTol);

// Kalman observability decomposition with an orthonormal T (T^-1 = T^T).
// Rows of T_o span the row space of the full observability matrix; in the
// new coordinates T A T^T = [[A_o, 0], [A_21, A_obar]] and C T^T = [C_o, 0].
struct ObsDecomposition {
  Matrix T;
  Matrix T_o;
  Matrix T_obar;
  Matrix A_o;
  Matrix A_21;
  Matrix A_obar;
  Matrix C_o;
  int n_o = 0;
  int n_obar = 0;

  /// Splits T * M into its observable and unobservable row blocks.
  std::pair<Matrix, Matrix> split(const Matrix& m) const;
};

ObsDecomposition observability_decomposition(const Matrix& a, const Matrix& c,
                                             double tol = kDefaultRankTol);

}  // namespace linalg
}  // namespace czdo
