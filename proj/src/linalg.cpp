#include "czdo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "czdo/error.hpp"

namespace czdo::linalg {

namespace {

Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

int count_above(const Vector& sv, double tol) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cut = tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

// Flip each row so its first entry of significant magnitude is positive.
void normalize_row_signs(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double scale = m.row(i).cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > 1e-12 * std::max(1.0, scale)) {
        if (m(i, j) < 0.0) m.row(i) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

int rank(const Matrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return count_above(svd.singularValues(), tol);
}

bool row_space_contains(const Matrix& a, const Matrix& b, double tol) {
  if (a.cols() != b.cols())
    throw Error(ErrorCode::Dimension, "row_space_contains: column counts differ");
  Matrix stacked(a.rows() + b.rows(), a.cols());
  stacked << a, b;
  return rank(stacked, tol) == rank(a, tol);
}

std::optional<Matrix> solve_left(const Matrix& a, const Matrix& b, double tol) {
  if (a.cols() != b.cols())
    throw Error(ErrorCode::Dimension, "solve_left: column counts differ");
  Matrix x = Matrix::Zero(b.rows(), a.rows());
  if (a.size() > 0) {
    // X A = B  <=>  A^T X^T = B^T; the pseudo-inverse gives the minimal-norm X.
    auto svd = thin_svd(a);
    const Vector& sv = svd.singularValues();
    const int r = count_above(sv, tol);
    if (r > 0) {
      const Matrix u = svd.matrixU().leftCols(r);
      const Matrix v = svd.matrixV().leftCols(r);
      const Vector inv = sv.head(r).cwiseInverse();
      x = ((b * v) * inv.asDiagonal()) * u.transpose();
    }
  }
  const double residual = (x * a - b).norm();
  if (residual > tol * (1.0 + b.norm())) return std::nullopt;
  return x;
}

Matrix observability_matrix(const Matrix& a, const Matrix& c, int blocks) {
  if (a.rows() != a.cols() || c.cols() != a.rows())
    throw Error(ErrorCode::Dimension, "observability_matrix: shape mismatch");
  if (blocks < 1) throw Error(ErrorCode::Dimension, "observability_matrix: blocks < 1");
  const Eigen::Index l = c.rows();
  Matrix out(blocks * l, a.cols());
  Matrix power = c;
  for (int k = 0; k < blocks; ++k) {
    out.middleRows(k * l, l) = power;
    power = power * a;
  }
  return out;
}

int observability_index(const Matrix& a, const Matrix& c, double tol) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1;
  const Matrix full = observability_matrix(a, c, n);
  const Eigen::Index l = c.rows();
  const int target = rank(full, tol);
  for (int k = 1; k <= n; ++k) {
    if (rank(full.topRows(k * l), tol) == target) return k;
  }
  return n;
}

std::pair<Matrix, Matrix> ObsDecomposition::split(const Matrix& m) const {
  const Matrix t = T * m;
  return {t.topRows(n_o), t.bottomRows(n_obar)};
}

ObsDecomposition observability_decomposition(const Matrix& a, const Matrix& c, double tol) {
  if (a.rows() != a.cols() || c.cols() != a.rows())
    throw Error(ErrorCode::Dimension, "observability_decomposition: shape mismatch");
  const Eigen::Index n = a.rows();
  ObsDecomposition d;
  Matrix t = Matrix::Identity(n, n);
  int r = 0;
  if (n > 0 && c.rows() > 0) {
    const Matrix obs = observability_matrix(a, c, static_cast<int>(n));
    Eigen::JacobiSVD<Matrix> svd(obs, Eigen::ComputeFullV);
    r = count_above(svd.singularValues(), tol);
    t = svd.matrixV().transpose();
  }
  normalize_row_signs(t);

  d.T = t;
  d.n_o = r;
  d.n_obar = static_cast<int>(n) - r;
  d.T_o = t.topRows(r);
  d.T_obar = t.bottomRows(d.n_obar);
  const Matrix at = t * a * t.transpose();
  d.A_o = at.topLeftCorner(r, r);
  d.A_21 = at.bottomLeftCorner(d.n_obar, r);
  d.A_obar = at.bottomRightCorner(d.n_obar, d.n_obar);
  d.C_o = (c * t.transpose()).leftCols(r);
  return d;
}

}  // namespace czdo::linalg
