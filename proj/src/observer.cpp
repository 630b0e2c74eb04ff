#include "czdo/observer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "czdo/error.hpp"

namespace czdo {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Vector input_or_zero(const Vector& u, Eigen::Index p) {
  return u.size() == p ? u : Vector::Zero(p);
}

}  // namespace

PlantModel::PlantModel(Matrix phi, Matrix gamma, Matrix g, Matrix xi, double rank_tol)
    : phi_(std::move(phi)), gamma_(std::move(gamma)), g_(std::move(g)), xi_(std::move(xi)) {
  const Eigen::Index n = phi_.rows();
  if (phi_.cols() != n) throw Error(ErrorCode::Dimension, "Phi must be square, got " + dims(phi_));
  if (gamma_.rows() != n) throw Error(ErrorCode::Dimension, "Gamma must have n rows, got " + dims(gamma_));
  if (g_.rows() != n) throw Error(ErrorCode::Dimension, "G must have n rows, got " + dims(g_));
  if (xi_.cols() != n) throw Error(ErrorCode::Dimension, "Xi must have n columns, got " + dims(xi_));
  if (!phi_.allFinite() || !gamma_.allFinite() || !g_.allFinite() || !xi_.allFinite())
    throw Error(ErrorCode::Dimension, "plant matrices must be finite");
  if (linalg::rank(g_, rank_tol) != g_.cols())
    throw Error(ErrorCode::Dimension, "G must have full column rank");
}

DisturbanceStepModel::DisturbanceStepModel(CZ set, double bound) : step_set(std::move(set)) {
  if (!step_set.all_generators_finite())
    throw Error(ErrorCode::Dimension, "disturbance step set must be bounded");
  const double diam = hull_diameter(cz::interval_hull(step_set));
  if (bound < 0.0) {
    diameter_bound = diam;
  } else {
    if (diam > bound * (1.0 + 1e-9) + 1e-12)
      throw Error(ErrorCode::Dimension, "disturbance step set exceeds its diameter bound");
    diameter_bound = bound;
  }
}

DisturbanceStepModel DisturbanceStepModel::from_box(const Box& box) {
  return DisturbanceStepModel(cz::from_box(box));
}

AugmentedModel augment(const PlantModel& plant) {
  const Eigen::Index n = plant.n(), q = plant.q(), p = plant.p(), l = plant.l();
  AugmentedModel m;
  m.A = Matrix::Zero(n + q, n + q);
  m.A.topLeftCorner(n, n) = plant.Phi();
  m.A.topRightCorner(n, q) = plant.G();
  m.A.bottomRightCorner(q, q).setIdentity();
  m.Gamma_bar = Matrix::Zero(n + q, p);
  m.Gamma_bar.topRows(n) = plant.Gamma();
  m.C = Matrix::Zero(l, n + q);
  m.C.leftCols(n) = plant.Xi();
  return m;
}

Matrix lower_ones_kron(int blocks, Eigen::Index l) {
  Matrix ones = Matrix::Zero(blocks, blocks);
  for (int i = 0; i < blocks; ++i)
    for (int j = 0; j < i; ++j) ones(i, j) = 1.0;
  return linalg::kron(ones, Matrix::Identity(l, l));
}

Matrix augmented_observability(const PlantModel& plant, int blocks) {
  const Matrix o = linalg::observability_matrix(plant.Phi(), plant.Xi(), blocks);
  const Matrix iog = lower_ones_kron(blocks, plant.l()) * o * plant.G();
  Matrix out(o.rows(), o.cols() + iog.cols());
  out << o, iog;
  return out;
}

ExistenceReport existence_check(const PlantModel& plant, double tol) {
  const auto n = static_cast<int>(plant.n());
  const auto q = static_cast<int>(plant.q());
  ExistenceReport r;
  r.depth = n + q;

  const Matrix o_aug = augmented_observability(plant, r.depth);
  const Matrix o = o_aug.leftCols(n);
  r.rank_O = linalg::rank(o, tol);
  r.rank_O_aug = linalg::rank(o_aug, tol);
  r.n_o = r.rank_O;
  r.N_o = r.rank_O_aug;

  const AugmentedModel aug = augment(plant);
  r.mu_o = linalg::observability_index(aug.A, aug.C, tol);

  if (n > 0) {
    const Matrix o_aug_n = augmented_observability(plant, n);
    r.rank_O_nblock = linalg::rank(o_aug_n.leftCols(n), tol);
    r.rank_O_aug_nblock = linalg::rank(o_aug_n, tol);
    r.exists_nblock = r.rank_O_aug_nblock == r.rank_O_nblock + q;
  }

  const bool by_rank = r.rank_O_aug == r.rank_O + q;
  Matrix selector = Matrix::Zero(q, n + q);
  selector.rightCols(q).setIdentity();
  const bool by_row_space = linalg::row_space_contains(o_aug, selector, tol);
  if (by_rank != by_row_space)
    throw Error(ErrorCode::InternalDisagreement,
                "rank identity and row-space test disagree (numerically borderline plant)");

  r.corollary1_reject = r.n_o < q;
  if (r.corollary1_reject && by_rank)
    throw Error(ErrorCode::InternalDisagreement, "rank identity holds although n_o < q");
  r.exists = !r.corollary1_reject && by_rank;
  return r;
}

CZ filter_step(const ObservableModel& m, const CZ& posterior, const Vector& u_prev, const CZ& step_set,
               const Vector& y) {
  const Vector shift = m.Gamma_o * input_or_zero(u_prev, m.Gamma_o.cols());
  const CZ prior = cz::minkowski_sum(cz::affine_image(m.A_o, posterior, shift),
                                     cz::affine_image(m.B_o, step_set));
  return cz::intersect_affine(prior, m.C_o, y);
}

CZ refilter_recursive(const ObservableModel& m, const Box& anchor,
                      std::span<const MeasurementRecord> records, const CZ& step_set) {
  CZ z = cz::from_box(anchor);
  for (const auto& rec : records) z = filter_step(m, z, rec.u_prev, step_set, rec.y);
  return z;
}

CZ refilter_monolithic(const ObservableModel& m, const Box& anchor,
                       std::span<const MeasurementRecord> records, const CZ& step_set) {
  const CZ start = cz::from_box(anchor);
  const auto window = static_cast<Eigen::Index>(records.size());
  const Eigen::Index no = m.A_o.rows();
  const Eigen::Index na = start.num_generators();
  const Eigen::Index nd = step_set.num_generators();
  const Eigen::Index ncd = step_set.num_constraints();
  const Eigen::Index l = m.C_o.rows();
  const Eigen::Index ng = na + window * nd;
  const Eigen::Index nc = window * (ncd + l);

  // A_o^i for i = 0..window.
  std::vector<Matrix> pow(static_cast<std::size_t>(window + 1));
  pow[0] = Matrix::Identity(no, no);
  for (Eigen::Index i = 1; i <= window; ++i)
    pow[static_cast<std::size_t>(i)] = m.A_o * pow[static_cast<std::size_t>(i - 1)];
  const Matrix bg = m.B_o * step_set.G();
  const Vector bc = m.B_o * step_set.c();

  Matrix G = Matrix::Zero(no, ng);
  Vector c = Vector::Zero(no);
  Matrix A = Matrix::Zero(nc, ng);
  Vector b = Vector::Zero(nc);
  Vector h(ng);
  h.head(na) = start.h();
  for (Eigen::Index j = 0; j < window; ++j) h.segment(na + j * nd, nd) = step_set.h();

  for (Eigen::Index j = 1; j <= window; ++j) {
    const auto& rec = records[static_cast<std::size_t>(j - 1)];
    // State after j steps: M_j xi + off_j.
    Matrix mj = Matrix::Zero(no, ng);
    mj.leftCols(na) = pow[static_cast<std::size_t>(j)] * start.G();
    Vector off = pow[static_cast<std::size_t>(j)] * start.c();
    for (Eigen::Index i = 1; i <= j; ++i) {
      const Matrix& ap = pow[static_cast<std::size_t>(j - i)];
      const auto& ri = records[static_cast<std::size_t>(i - 1)];
      mj.middleCols(na + (i - 1) * nd, nd) = ap * bg;
      off += ap * (m.Gamma_o * input_or_zero(ri.u_prev, m.Gamma_o.cols()) + bc);
    }
    const Eigen::Index row0 = (j - 1) * (ncd + l);
    A.block(row0, na + (j - 1) * nd, ncd, nd) = step_set.A();
    b.segment(row0, ncd) = step_set.b();
    A.middleRows(row0 + ncd, l) = m.C_o * mj;
    b.segment(row0 + ncd, l) = rec.y - m.C_o * off;
    if (j == window) {
      G = mj;
      c = off;
    }
  }
  if (window == 0) {
    G.leftCols(na) = start.G();
    c = start.c();
  }
  return CZ(G, c, A, b, h);
}

DisturbanceObserver DisturbanceObserver::build(const PlantModel& plant,
                                               const DisturbanceStepModel& dist, const Box& x0_box,
                                               int delta, const Tolerances& tol, WindowMode mode) {
  if (x0_box.dim() != plant.n())
    throw Error(ErrorCode::Dimension, "x0 box must have dimension n");
  if (dist.step_set.dim() != plant.q())
    throw Error(ErrorCode::Dimension, "disturbance step set must have dimension q");

  DisturbanceObserver obs;
  obs.report_ = existence_check(plant, tol.rank);
  if (!obs.report_.exists)
    throw Error(ErrorCode::NotExistent, "no bounded disturbance observer exists for this plant");
  const int min_delta = std::max(1, obs.report_.mu_o - 1);
  if (delta < min_delta)
    throw Error(ErrorCode::DeltaTooSmall, "delta = " + std::to_string(delta) +
                                              " but the observability index requires delta >= " +
                                              std::to_string(min_delta));

  const Eigen::Index n = plant.n(), q = plant.q();
  const AugmentedModel aug = augment(plant);
  obs.decomp_ = linalg::observability_decomposition(aug.A, aug.C, tol.rank);
  const auto& d = obs.decomp_;
  obs.model_.A_o = d.A_o;
  obs.model_.B_o = d.T_o.rightCols(q);
  obs.model_.Gamma_o = d.T_o * aug.Gamma_bar;
  obs.model_.C_o = d.C_o;

  Matrix selector = Matrix::Zero(q, n + q);
  selector.rightCols(q).setIdentity();
  auto p = linalg::solve_left(d.T_o, selector, tol.rank);
  if (!p)
    throw Error(ErrorCode::InternalDisagreement,
                "existence holds but P T_o = [0 I] has no solution");
  obs.P_ = *p;

  obs.prior0_ = cz::affine_image(
      d.T_o, cz::from_box(Box::product(x0_box, Box::whole_space(q))));
  obs.step_set_ = dist.step_set;
  obs.tol_ = tol;
  obs.mode_ = mode;
  obs.delta_ = delta;
  obs.p_ = plant.p();
  obs.q_ = q;
  return obs;
}

DisturbanceEstimate DisturbanceObserver::step(const std::optional<Vector>& u_prev, const Vector& y) {
  if (y.size() != model_.C_o.rows())
    throw Error(ErrorCode::Dimension, "measurement has wrong dimension");
  MeasurementRecord rec;
  if (k_ > 0) {
    if (u_prev && u_prev->size() != p_)
      throw Error(ErrorCode::Dimension, "input has wrong dimension");
    rec.u_prev = u_prev ? *u_prev : Vector::Zero(p_);
  }
  rec.y = y;

  CZ next;
  if (k_ == 0) {
    next = cz::intersect_affine(prior0_, model_.C_o, y);
  } else if (k_ < delta_) {
    next = filter_step(model_, posterior_, rec.u_prev, step_set_, y);
  }
  records_.push_back(rec);
  if (static_cast<int>(records_.size()) > delta_) records_.pop_front();
  if (k_ >= delta_) {
    const Box& anchor = post_hulls_.front();
    const std::vector<MeasurementRecord> window(records_.begin(), records_.end());
    next = mode_ == WindowMode::Recursive
               ? refilter_recursive(model_, anchor, window, step_set_)
               : refilter_monolithic(model_, anchor, window, step_set_);
  }

  // Hulls of Z_k (anchor for k + delta) and of P Z_k share one feasible set.
  const Eigen::Index no = model_.A_o.rows();
  Matrix stacked(no + q_, no);
  stacked << Matrix::Identity(no, no), P_;
  Box both;
  try {
    both = cz::interval_hull(cz::affine_image(stacked, next), tol_.lp_options());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptySet) throw;
    throw Error(ErrorCode::EmptyPosterior,
                "posterior is empty at step k = " + std::to_string(k_) +
                    " (measurement inconsistent with the propagated set)");
  }

  posterior_ = std::move(next);
  dist_set_ = cz::affine_image(P_, posterior_);
  Box anchor(both.lower.head(no), both.upper.head(no));
  for (Eigen::Index i = 0; i < no; ++i) {
    if (!anchor.bounded(i)) {
      anchor.lower(i) = -std::numeric_limits<double>::infinity();
      anchor.upper(i) = std::numeric_limits<double>::infinity();
    }
  }
  post_hulls_.push_back(std::move(anchor));
  if (static_cast<int>(post_hulls_.size()) > delta_) post_hulls_.pop_front();

  DisturbanceEstimate est;
  est.hull = Box(both.lower.tail(q_), both.upper.tail(q_));
  const HullCenter hc = center_of_hull(est.hull);
  est.d_hat = hc.center;
  est.bounded = hc.bounded;
  est.diameter = hull_diameter(est.hull);
  ++k_;
  return est;
}

}  // namespace czdo
