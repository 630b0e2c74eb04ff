#include "czdo/czono.hpp"

#include <cmath>
#include <limits>

#include "czdo/error.hpp"

namespace czdo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(const Matrix& m) { return m.allFinite(); }

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Vector stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::Dimension, "Box: size mismatch");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower(i)) || std::isnan(upper(i)) || lower(i) > upper(i))
      throw Error(ErrorCode::Dimension, "Box: lower must not exceed upper");
  }
}

Box Box::whole_space(Eigen::Index dim) {
  return Box(Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf));
}

Box Box::point(const Vector& p) { return Box(p, p); }

bool Box::bounded(Eigen::Index i) const {
  return std::isfinite(lower(i)) && std::isfinite(upper(i));
}

bool Box::all_bounded() const {
  for (Eigen::Index i = 0; i < dim(); ++i)
    if (!bounded(i)) return false;
  return true;
}

Vector Box::widths() const {
  Vector w(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) w(i) = bounded(i) ? upper(i) - lower(i) : kInf;
  return w;
}

Box Box::product(const Box& a, const Box& b) {
  return Box(stack(a.lower, b.lower), stack(a.upper, b.upper));
}

HullCenter center_of_hull(const Box& box) {
  HullCenter out;
  out.center = Vector::Zero(box.dim());
  out.bounded.assign(static_cast<std::size_t>(box.dim()), false);
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    if (box.bounded(i)) {
      out.center(i) = 0.5 * (box.lower(i) + box.upper(i));
      out.bounded[static_cast<std::size_t>(i)] = true;
    }
  }
  return out;
}

double hull_diameter(const Box& box) {
  if (!box.all_bounded()) return kInf;
  return box.widths().norm();
}

ConstrainedZonotope::ConstrainedZonotope(Matrix G, Vector c, Matrix A, Vector b, Vector h) {
  const Eigen::Index ng = G.cols();
  if (G.rows() != c.size() || A.cols() != ng || b.size() != A.rows() || h.size() != ng)
    throw Error(ErrorCode::Dimension, "ConstrainedZonotope: inconsistent quintuple dimensions");
  if (!finite(G) || !c.allFinite() || !finite(A) || !b.allFinite())
    throw Error(ErrorCode::Dimension, "ConstrainedZonotope: non-finite G, c, A or b");
  for (Eigen::Index j = 0; j < ng; ++j) {
    if (std::isnan(h(j)) || h(j) < 0.0)
      throw Error(ErrorCode::Dimension, "ConstrainedZonotope: generator bounds must be >= 0");
  }

  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(ng));
  for (Eigen::Index j = 0; j < ng; ++j) {
    if (h(j) == 0.0) continue;
    const bool zero_col = G.col(j).isZero(0.0) && A.col(j).isZero(0.0);
    if (zero_col) continue;
    keep.push_back(j);
  }
  const auto nk = static_cast<Eigen::Index>(keep.size());
  G_.resize(G.rows(), nk);
  Matrix a_kept(A.rows(), nk);
  h_.resize(nk);
  for (Eigen::Index k = 0; k < nk; ++k) {
    G_.col(k) = G.col(keep[k]);
    a_kept.col(k) = A.col(keep[k]);
    h_(k) = h(keep[k]);
  }

  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < a_kept.rows(); ++i) {
    if (a_kept.row(i).isZero(0.0) && std::abs(b(i)) <= 1e-12) continue;
    rows.push_back(i);
  }
  A_.resize(static_cast<Eigen::Index>(rows.size()), nk);
  b_.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A_.row(static_cast<Eigen::Index>(r)) = a_kept.row(rows[r]);
    b_(static_cast<Eigen::Index>(r)) = b(rows[r]);
  }
  c_ = std::move(c);
}

ConstrainedZonotope::ConstrainedZonotope(Matrix G, Vector c, Vector h)
    : ConstrainedZonotope(G, std::move(c), Matrix(0, G.cols()), Vector(0), std::move(h)) {}

bool ConstrainedZonotope::all_generators_finite() const { return h_.allFinite(); }

namespace cz {

CZ from_box(const Box& box) {
  const Eigen::Index n = box.dim();
  Vector c(n), h(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool lo_fin = std::isfinite(box.lower(i));
    const bool hi_fin = std::isfinite(box.upper(i));
    if (lo_fin != hi_fin)
      throw Error(ErrorCode::MixedBound, "from_box: one-sided infinite interval in dimension " +
                                             std::to_string(i));
    if (lo_fin) {
      c(i) = 0.5 * (box.lower(i) + box.upper(i));
      h(i) = 0.5 * (box.upper(i) - box.lower(i));
    } else {
      c(i) = 0.0;
      h(i) = kInf;
    }
  }
  return CZ(Matrix::Identity(n, n), c, h);
}

CZ affine_image(const Matrix& R, const CZ& z, const Vector& t) {
  if (R.cols() != z.dim() || t.size() != R.rows())
    throw Error(ErrorCode::Dimension, "affine_image: shape mismatch");
  return CZ(R * z.G(), R * z.c() + t, z.A(), z.b(), z.h());
}

CZ affine_image(const Matrix& R, const CZ& z) {
  return affine_image(R, z, Vector::Zero(R.rows()));
}

CZ minkowski_sum(const CZ& z1, const CZ& z2) {
  if (z1.dim() != z2.dim()) throw Error(ErrorCode::Dimension, "minkowski_sum: dimension mismatch");
  Matrix G(z1.dim(), z1.num_generators() + z2.num_generators());
  G << z1.G(), z2.G();
  return CZ(G, z1.c() + z2.c(), block_diag(z1.A(), z2.A()), stack(z1.b(), z2.b()),
            stack(z1.h(), z2.h()));
}

CZ intersect_affine(const CZ& z, const Matrix& C, const Vector& y) {
  if (C.cols() != z.dim() || y.size() != C.rows())
    throw Error(ErrorCode::Dimension, "intersect_affine: shape mismatch");
  Matrix A(z.num_constraints() + C.rows(), z.num_generators());
  A << z.A(), C * z.G();
  return CZ(z.G(), z.c(), A, stack(z.b(), y - C * z.c()), z.h());
}

CZ cartesian_product(const CZ& z1, const CZ& z2) {
  return CZ(block_diag(z1.G(), z2.G()), stack(z1.c(), z2.c()), block_diag(z1.A(), z2.A()),
            stack(z1.b(), z2.b()), stack(z1.h(), z2.h()));
}

bool is_empty(const CZ& z, double feas_tol) {
  if (z.num_constraints() == 0) return false;
  lp::Options opts;
  opts.feas_tol = feas_tol;
  lp::Polyhedron poly(z.A(), z.b(), -z.h(), z.h(), opts);
  return !poly.feasible();
}

HullWitness interval_hull_witnessed(const CZ& z, const lp::Options& opts) {
  const Eigen::Index n = z.dim();
  const Eigen::Index ng = z.num_generators();
  HullWitness out;
  out.box = Box(Vector::Zero(n), Vector::Zero(n));
  out.argmin.resize(static_cast<std::size_t>(n));
  out.argmax.resize(static_cast<std::size_t>(n));

  if (z.num_constraints() == 0) {
    // Closed form: each generator independently at its extreme.
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector lo_xi = Vector::Zero(ng), hi_xi = Vector::Zero(ng);
      double radius = 0.0;
      for (Eigen::Index j = 0; j < ng; ++j) {
        const double g = z.G()(i, j);
        if (g == 0.0) continue;
        radius += std::abs(g) * z.h()(j);
        const double s = g > 0.0 ? 1.0 : -1.0;
        lo_xi(j) = -s * z.h()(j);
        hi_xi(j) = s * z.h()(j);
      }
      out.box.lower(i) = z.c()(i) - radius;
      out.box.upper(i) = z.c()(i) + radius;
      if (std::isfinite(radius)) {
        out.argmin[static_cast<std::size_t>(i)] = lo_xi;
        out.argmax[static_cast<std::size_t>(i)] = hi_xi;
      }
    }
    return out;
  }

  lp::Polyhedron poly(z.A(), z.b(), -z.h(), z.h(), opts);
  if (!poly.feasible()) throw Error(ErrorCode::EmptySet, "interval_hull: set is empty");
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector row = z.G().row(i).transpose();
    const lp::Outcome lo = poly.minimize(row);
    if (lo.status == lp::Status::Optimal) {
      out.box.lower(i) = z.c()(i) + lo.value;
      out.argmin[static_cast<std::size_t>(i)] = lo.point;
    } else {
      out.box.lower(i) = -kInf;
    }
    const lp::Outcome hi = poly.minimize(-row);
    if (hi.status == lp::Status::Optimal) {
      out.box.upper(i) = z.c()(i) - hi.value;
      out.argmax[static_cast<std::size_t>(i)] = hi.point;
    } else {
      out.box.upper(i) = kInf;
    }
    // Guard against round-off inverting a degenerate interval.
    if (out.box.lower(i) > out.box.upper(i)) {
      const double mid = 0.5 * (out.box.lower(i) + out.box.upper(i));
      out.box.lower(i) = mid;
      out.box.upper(i) = mid;
    }
  }
  return out;
}

Box interval_hull(const CZ& z, const lp::Options& opts) {
  return interval_hull_witnessed(z, opts).box;
}

bool contains_point(const CZ& z, const Vector& p, double feas_tol, const lp::Options& opts) {
  if (p.size() != z.dim()) throw Error(ErrorCode::Dimension, "contains_point: dimension mismatch");
  const Eigen::Index n = z.dim();
  const Eigen::Index ng = z.num_generators();
  const Eigen::Index nc = z.num_constraints();
  // Variables [xi; s] with G xi - s = p - c, A xi = b, |s| <= feas_tol.
  Matrix A = Matrix::Zero(nc + n, ng + n);
  A.topLeftCorner(nc, ng) = z.A();
  A.bottomLeftCorner(n, ng) = z.G();
  A.bottomRightCorner(n, n) = -Matrix::Identity(n, n);
  Vector b(nc + n);
  b << z.b(), p - z.c();
  Vector lo(ng + n), hi(ng + n);
  lo << -z.h(), Vector::Constant(n, -feas_tol);
  hi << z.h(), Vector::Constant(n, feas_tol);
  lp::Polyhedron poly(A, b, lo, hi, opts);
  return poly.feasible();
}

}  // namespace cz
}  // namespace czdo
