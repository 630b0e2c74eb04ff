#include "czdo/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "czdo/error.hpp"

namespace czdo::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr int kRefactorEvery = 50;
constexpr int kBlandAfter = 25;

enum class VarState : unsigned char { Basic, Lower, Upper, FreeZero };

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Unbounded: return "Unbounded";
    case Status::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

// Dense revised simplex over [A | D] x = b with D = diag(+-1) artificial
// columns. Rows are scaled to unit max-abs coefficient.
class Polyhedron::Engine {
 public:
  Engine(const Matrix& a, const Vector& b, const Vector& lower, const Vector& upper,
         const Options& opts)
      : opts_(opts), m_(a.rows()), ns_(a.cols()), n_(ns_ + m_) {
    if (b.size() != m_ || lower.size() != ns_ || upper.size() != ns_)
      throw Error(ErrorCode::Dimension, "linear program: inconsistent dimensions");
    for (Eigen::Index j = 0; j < ns_; ++j) {
      if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) ||
          lower(j) == kInf || upper(j) == -kInf)
        throw Error(ErrorCode::Dimension, "linear program: invalid bounds");
    }
    a_.resize(m_, n_);
    b_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double row_max = ns_ > 0 ? a.row(i).cwiseAbs().maxCoeff() : 0.0;
      const double s = row_max > 0.0 ? 1.0 / row_max : 1.0;
      a_.row(i).head(ns_) = s * a.row(i);
      b_(i) = s * b(i);
    }
    a_.rightCols(m_).setZero();
    lo_.resize(n_);
    up_.resize(n_);
    lo_.head(ns_) = lower;
    up_.head(ns_) = upper;
    lo_.tail(m_).setZero();
    up_.tail(m_).setConstant(kInf);
    max_iter_ = opts.max_iterations > 0 ? opts.max_iterations
                                        : std::max<int>(2000, 100 * static_cast<int>(n_ + m_));

    state_.assign(n_, VarState::Lower);
    x_ = Vector::Zero(n_);
    for (Eigen::Index j = 0; j < ns_; ++j) {
      if (std::isfinite(lo_(j))) {
        state_[j] = VarState::Lower;
        x_(j) = lo_(j);
      } else if (std::isfinite(up_(j))) {
        state_[j] = VarState::Upper;
        x_(j) = up_(j);
      } else {
        state_[j] = VarState::FreeZero;
        x_(j) = 0.0;
      }
    }
    const Vector r = b_ - a_.leftCols(ns_) * x_.head(ns_);
    basis_.resize(m_);
    binv_ = Matrix::Zero(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = r(i) < 0.0 ? -1.0 : 1.0;
      a_(i, ns_ + i) = sign;
      binv_(i, i) = sign;
      basis_[i] = ns_ + i;
      state_[ns_ + i] = VarState::Basic;
      x_(ns_ + i) = std::abs(r(i));
    }
    b_norm_ = m_ > 0 ? b_.cwiseAbs().maxCoeff() : 0.0;
    phase_one();
  }

  bool feasible() const { return feasible_; }

  Vector point() const { return x_.head(ns_); }

  Outcome minimize(const Vector& c) {
    if (c.size() != ns_) throw Error(ErrorCode::Dimension, "objective dimension mismatch");
    Outcome out;
    if (!feasible_) {
      out.status = Status::Infeasible;
      return out;
    }
    cost_ = Vector::Zero(n_);
    cost_.head(ns_) = c;
    const double dtol = opts_.opt_tol * std::max(1.0, c.cwiseAbs().maxCoeff());
    if (!iterate(dtol)) {
      out.status = Status::Unbounded;
      return out;
    }
    out.status = Status::Optimal;
    out.point = x_.head(ns_);
    out.value = c.dot(out.point);
    return out;
  }

 private:
  void refactor() {
    if (m_ == 0) return;
    Matrix basis_cols(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) basis_cols.col(i) = a_.col(basis_[i]);
    binv_ = Eigen::PartialPivLU<Matrix>(basis_cols).inverse();
    Vector rhs = b_;
    for (Eigen::Index j = 0; j < n_; ++j)
      if (state_[j] != VarState::Basic && x_(j) != 0.0) rhs -= a_.col(j) * x_(j);
    const Vector xb = binv_ * rhs;
    for (Eigen::Index i = 0; i < m_; ++i) x_(basis_[i]) = xb(i);
    since_refactor_ = 0;
  }

  void phase_one() {
    cost_ = Vector::Zero(n_);
    cost_.tail(m_).setOnes();
    iterate(opts_.opt_tol);
    const double infeasibility = m_ > 0 ? x_.tail(m_).sum() : 0.0;
    feasible_ = infeasibility <= opts_.feas_tol * std::max(1.0, b_norm_);
    if (!feasible_) return;
    // Artificials are pinned at zero from here on.
    for (Eigen::Index j = ns_; j < n_; ++j) {
      up_(j) = 0.0;
      if (state_[j] != VarState::Basic) {
        state_[j] = VarState::Lower;
        x_(j) = 0.0;
      }
    }
  }

  // Returns false on an unbounded improving ray.
  bool iterate(double dtol) {
    bool bland = false;
    int degenerate_streak = 0;
    int iterations = 0;
    Vector cb(m_), y(m_), alpha(m_);
    for (;;) {
      if (++iterations > max_iter_)
        throw Error(ErrorCode::IterationLimit, "simplex exceeded iteration limit");
      for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost_(basis_[i]);
      y.noalias() = binv_.transpose() * cb;

      // Pricing.
      Eigen::Index enter = -1;
      double best = 0.0, enter_d = 0.0;
      for (Eigen::Index j = 0; j < n_; ++j) {
        const VarState st = state_[j];
        if (st == VarState::Basic) continue;
        if (lo_(j) == up_(j)) continue;
        const double d = cost_(j) - a_.col(j).dot(y);
        bool eligible = false;
        switch (st) {
          case VarState::Lower: eligible = d < -dtol; break;
          case VarState::Upper: eligible = d > dtol; break;
          case VarState::FreeZero: eligible = std::abs(d) > dtol; break;
          default: break;
        }
        if (!eligible) continue;
        if (bland) {
          enter = j;
          enter_d = d;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          enter_d = d;
        }
      }
      if (enter < 0) {
        refactor();
        return true;
      }

      const double dir = enter_d < 0.0 ? 1.0 : -1.0;
      alpha.noalias() = binv_ * a_.col(enter);

      // Harris two-pass ratio test. x_B(t) = x_B - t * dir * alpha.
      const double ftol = opts_.feas_tol;
      double relaxed = kInf;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double g = dir * alpha(i);
        const Eigen::Index v = basis_[i];
        if (g > kPivotTol && std::isfinite(lo_(v))) {
          relaxed = std::min(relaxed, (x_(v) - lo_(v) + ftol) / g);
        } else if (g < -kPivotTol && std::isfinite(up_(v))) {
          relaxed = std::min(relaxed, (up_(v) - x_(v) + ftol) / -g);
        }
      }
      const double range = up_(enter) - lo_(enter);

      Eigen::Index leave_row = -1;
      double theta = kInf;
      if (std::isfinite(relaxed)) {
        double best_pivot = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
          const double g = dir * alpha(i);
          const Eigen::Index v = basis_[i];
          double ratio;
          if (g > kPivotTol && std::isfinite(lo_(v))) {
            ratio = (x_(v) - lo_(v)) / g;
          } else if (g < -kPivotTol && std::isfinite(up_(v))) {
            ratio = (up_(v) - x_(v)) / -g;
          } else {
            continue;
          }
          if (ratio > relaxed) continue;
          ratio = std::max(ratio, 0.0);
          bool take;
          if (bland) {
            take = leave_row < 0 || ratio < theta - kDegenerateStep ||
                   (ratio <= theta + kDegenerateStep && v < basis_[leave_row]);
          } else {
            take = std::abs(g) > best_pivot;
          }
          if (take) {
            leave_row = i;
            theta = ratio;
            best_pivot = std::abs(g);
          }
        }
      }

      if (range <= theta) {
        // Bound flip, no basis change.
        if (!std::isfinite(range)) return false;
        const double step = dir * range;
        x_(enter) += step;
        if (m_ > 0) {
          for (Eigen::Index i = 0; i < m_; ++i) x_(basis_[i]) -= step * alpha(i);
        }
        state_[enter] = dir > 0 ? VarState::Upper : VarState::Lower;
        x_(enter) = dir > 0 ? up_(enter) : lo_(enter);
        degenerate_streak = 0;
        continue;
      }
      if (leave_row < 0) return false;

      const double step = dir * theta;
      x_(enter) += step;
      for (Eigen::Index i = 0; i < m_; ++i) x_(basis_[i]) -= step * alpha(i);
      const Eigen::Index leaving = basis_[leave_row];
      const double g = dir * alpha(leave_row);
      if (g > 0.0) {
        state_[leaving] = VarState::Lower;
        x_(leaving) = lo_(leaving);
      } else {
        state_[leaving] = VarState::Upper;
        x_(leaving) = up_(leaving);
      }
      basis_[leave_row] = enter;
      state_[enter] = VarState::Basic;

      // Product-form update of the explicit inverse.
      const double pivot = alpha(leave_row);
      binv_.row(leave_row) /= pivot;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (i != leave_row && alpha(i) != 0.0) binv_.row(i) -= alpha(i) * binv_.row(leave_row);
      }
      if (++since_refactor_ >= kRefactorEvery) refactor();

      if (theta < kDegenerateStep) {
        if (++degenerate_streak > kBlandAfter) bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
  }

  Options opts_;
  Eigen::Index m_, ns_, n_;
  Matrix a_;
  Vector b_, lo_, up_, cost_, x_;
  Matrix binv_;
  std::vector<Eigen::Index> basis_;
  std::vector<VarState> state_;
  double b_norm_ = 0.0;
  bool feasible_ = false;
  int max_iter_ = 0;
  int since_refactor_ = 0;
};

Polyhedron::Polyhedron(const Matrix& eq_lhs, const Vector& eq_rhs, const Vector& lower,
                       const Vector& upper, const Options& opts)
    : engine_(std::make_unique<Engine>(eq_lhs, eq_rhs, lower, upper, opts)) {}

Polyhedron::~Polyhedron() = default;
Polyhedron::Polyhedron(Polyhedron&&) noexcept = default;
Polyhedron& Polyhedron::operator=(Polyhedron&&) noexcept = default;

bool Polyhedron::feasible() const { return engine_->feasible(); }

Vector Polyhedron::feasible_point() const {
  return engine_->feasible() ? engine_->point() : Vector();
}

Outcome Polyhedron::minimize(const Vector& c) { return engine_->minimize(c); }

Outcome solve(const LinearProgram& lp, const Options& opts) {
  if (lp.objective.size() != lp.eq_lhs.cols())
    throw Error(ErrorCode::Dimension, "linear program: objective dimension mismatch");
  Polyhedron poly(lp.eq_lhs, lp.eq_rhs, lp.lower, lp.upper, opts);
  return poly.minimize(lp.objective);
}

}  // namespace czdo::lp
