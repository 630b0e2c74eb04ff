#include "czdo/oracle.hpp"

#include <cmath>
#include <limits>

#include "czdo/error.hpp"

namespace czdo::oracle {

Box exact_posterior_hull(const TrajectoryLp& tlp, const lp::Options& opts) {
  if (tlp.plant == nullptr || tlp.step_set == nullptr)
    throw Error(ErrorCode::Dimension, "trajectory LP needs a plant and a step set");
  if (tlp.measurements.empty())
    throw Error(ErrorCode::Dimension, "trajectory LP needs at least y_0");
  const PlantModel& pl = *tlp.plant;
  const CZ& ds = *tlp.step_set;
  const Eigen::Index n = pl.n(), q = pl.q(), l = pl.l(), p = pl.p();
  const auto horizon = static_cast<Eigen::Index>(tlp.measurements.size()) - 1;
  if (static_cast<Eigen::Index>(tlp.inputs.size()) < horizon)
    throw Error(ErrorCode::Dimension, "trajectory LP needs inputs u_0 .. u_{k-1}");
  if (tlp.x0_box.dim() != n || ds.dim() != q)
    throw Error(ErrorCode::Dimension, "trajectory LP dimensions disagree with the plant");

  const Eigen::Index nd = ds.num_generators();
  const Eigen::Index ncd = ds.num_constraints();
  const Eigen::Index nvar = n + q + horizon * nd;
  const Eigen::Index nrows = (horizon + 1) * l + horizon * ncd;
  constexpr double inf = std::numeric_limits<double>::infinity();

  Vector lower(nvar), upper(nvar);
  lower.head(n) = tlp.x0_box.lower;
  upper.head(n) = tlp.x0_box.upper;
  lower.segment(n, q).setConstant(-inf);
  upper.segment(n, q).setConstant(inf);
  for (Eigen::Index j = 0; j < horizon; ++j) {
    lower.segment(n + q + j * nd, nd) = -ds.h();
    upper.segment(n + q + j * nd, nd) = ds.h();
  }

  Matrix eq = Matrix::Zero(nrows, nvar);
  Vector rhs = Vector::Zero(nrows);
  Eigen::Index row = 0;

  // x_j = X v + x_off, d_j = D v + d_off.
  Matrix X = Matrix::Zero(n, nvar);
  X.leftCols(n).setIdentity();
  Vector x_off = Vector::Zero(n);
  Matrix D = Matrix::Zero(q, nvar);
  D.middleCols(n, q).setIdentity();
  Vector d_off = Vector::Zero(q);

  for (Eigen::Index j = 0;; ++j) {
    const Vector& y = tlp.measurements[static_cast<std::size_t>(j)];
    if (y.size() != l) throw Error(ErrorCode::Dimension, "measurement has wrong dimension");
    eq.middleRows(row, l) = pl.Xi() * X;
    rhs.segment(row, l) = y - pl.Xi() * x_off;
    row += l;
    if (j == horizon) break;

    const Vector& u = tlp.inputs[static_cast<std::size_t>(j)];
    if (u.size() != p) throw Error(ErrorCode::Dimension, "input has wrong dimension");
    // Advance x before d: x_{j+1} uses d_j.
    X = pl.Phi() * X + pl.G() * D;
    x_off = pl.Phi() * x_off + pl.Gamma() * u + pl.G() * d_off;
    const Eigen::Index col = n + q + j * nd;
    D.middleCols(col, nd) += ds.G();
    d_off += ds.c();
    if (ncd > 0) {
      eq.block(row, col, ncd, nd) = ds.A();
      rhs.segment(row, ncd) = ds.b();
      row += ncd;
    }
  }

  lp::Polyhedron poly(eq, rhs, lower, upper, opts);
  if (!poly.feasible())
    throw Error(ErrorCode::InfeasibleTrajectory, "measurements are inconsistent with the model");
  Box out(Vector::Zero(q), Vector::Zero(q));
  for (Eigen::Index i = 0; i < q; ++i) {
    const Vector row_i = D.row(i).transpose();
    const lp::Outcome lo = poly.minimize(row_i);
    out.lower(i) = lo.status == lp::Status::Optimal ? lo.value + d_off(i) : -inf;
    const lp::Outcome hi = poly.minimize(-row_i);
    out.upper(i) = hi.status == lp::Status::Optimal ? -hi.value + d_off(i) : inf;
  }
  return out;
}

}  // namespace czdo::oracle
