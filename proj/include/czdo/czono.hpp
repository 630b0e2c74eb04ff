#pragma once

#include <vector>

#include "czdo/linalg.hpp"
#include "czdo/lp.hpp"

namespace czdo {

// Axis-aligned box; entries may be infinite. A dimension is either finite on
// both sides or the whole line.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);

  static Box whole_space(Eigen::Index dim);
  static Box point(const Vector& p);

  Eigen::Index dim() const { return lower.size(); }
  bool bounded(Eigen::Index i) const;
  bool all_bounded() const;
  Vector widths() const;  // +inf on unbounded dims

  static Box product(const Box& a, const Box& b);
};

struct HullCenter {
  Vector center;
  std::vector<bool> bounded;
};

/// Midpoint per finite dimension; unbounded dimensions give 0 and a false flag.
HullCenter center_of_hull(const Box& box);

/// Euclidean diameter of a box, +inf if any dimension is unbounded.
double hull_diameter(const Box& box);

// Extended constrained zonotope
//   { G xi + c : A xi = b, |xi_j| <= h_j },  h_j in (0, +inf].
// Zero-radius generators and generators with all-zero G and A columns are
// pruned on construction.
class ConstrainedZonotope {
 public:
  ConstrainedZonotope() = default;
  ConstrainedZonotope(Matrix G, Vector c, Matrix A, Vector b, Vector h);

  /// Unconstrained zonotope.
  ConstrainedZonotope(Matrix G, Vector c, Vector h);

  const Matrix& G() const { return G_; }
  const Vector& c() const { return c_; }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& h() const { return h_; }

  Eigen::Index dim() const { return c_.size(); }
  Eigen::Index num_generators() const { return G_.cols(); }
  Eigen::Index num_constraints() const { return A_.rows(); }
  bool all_generators_finite() const;

 private:
  Matrix G_;
  Vector c_;
  Matrix A_;
  Vector b_;
  Vector h_;
};

using CZ = ConstrainedZonotope;

namespace cz {

/// Identity-aligned CZ for a box; rejects one-sided infinite intervals.
CZ from_box(const Box& box);

/// R Z + t.
CZ affine_image(const Matrix& R, const CZ& z, const Vector& t);
CZ affine_image(const Matrix& R, const CZ& z);

CZ minkowski_sum(const CZ& z1, const CZ& z2);

/// Z intersected with the affine space {z : C z = y}.
CZ intersect_affine(const CZ& z, const Matrix& C, const Vector& y);

CZ cartesian_product(const CZ& z1, const CZ& z2);

bool is_empty(const CZ& z, double feas_tol = lp::kDefaultFeasTol);

/// LP-based interval hull. Throws Error(EmptySet) if z is empty.
Box interval_hull(const CZ& z, const lp::Options& opts = {});

// Hull together with the generator vectors xi that attain each bound
// (empty vectors for unbounded sides).
struct HullWitness {
  Box box;
  std::vector<Vector> argmin;
  std::vector<Vector> argmax;
};
HullWitness interval_hull_witnessed(const CZ& z, const lp::Options& opts = {});

/// True iff some feasible xi puts G xi + c within feas_tol of p in the inf-norm.
bool contains_point(const CZ& z, const Vector& p, double feas_tol = 1e-6,
                    const lp::Options& opts = {});

}  // namespace cz
}  // namespace czdo
