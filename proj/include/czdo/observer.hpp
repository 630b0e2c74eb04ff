#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "czdo/czono.hpp"
#include "czdo/linalg.hpp"

namespace czdo {

struct Tolerances {
  double rank = kDefaultRankTol;
  double lp = lp::kDefaultFeasTol;
  double contain = 1e-6;

  lp::Options lp_options() const {
    lp::Options o;
    o.feas_tol = lp;
    o.opt_tol = lp;
    return o;
  }
};

// x_{k+1} = Phi x_k + Gamma u_k + G d_k,  y_k = Xi x_k.
// G must have full column rank.
class PlantModel {
 public:
  PlantModel(Matrix phi, Matrix gamma, Matrix g, Matrix xi, double rank_tol = kDefaultRankTol);

  const Matrix& Phi() const { return phi_; }
  const Matrix& Gamma() const { return gamma_; }
  const Matrix& G() const { return g_; }
  const Matrix& Xi() const { return xi_; }

  Eigen::Index n() const { return phi_.rows(); }
  Eigen::Index p() const { return gamma_.cols(); }
  Eigen::Index q() const { return g_.cols(); }
  Eigen::Index l() const { return xi_.rows(); }

 private:
  Matrix phi_, gamma_, g_, xi_;
};

// Stationary outer bound on the per-step disturbance increment d_{k+1} - d_k.
struct DisturbanceStepModel {
  CZ step_set;
  double diameter_bound = 0.0;

  /// Validates boundedness; a negative diameter_bound means "use the hull diameter".
  DisturbanceStepModel(CZ set, double diameter_bound = -1.0);

  static DisturbanceStepModel from_box(const Box& box);
};

// z = [x; d]:  z_{k+1} = A z_k + Gamma_bar u_k + [0; I] dd_k,  y_k = C z_k.
struct AugmentedModel {
  Matrix A;
  Matrix Gamma_bar;
  Matrix C;
};

AugmentedModel augment(const PlantModel& plant);

struct ExistenceReport {
  bool exists = false;
  int depth = 0;  // block rows used for O and I_bar (n + q)
  int rank_O = 0;
  int rank_O_aug = 0;
  int n_o = 0;
  int N_o = 0;
  int mu_o = 0;
  bool corollary1_reject = false;
  // The same rank identity evaluated with n block rows.
  int rank_O_nblock = 0;
  int rank_O_aug_nblock = 0;
  bool exists_nblock = false;
};

/// Strictly-lower block-ones matrix with `blocks` blocks of size l.
Matrix lower_ones_kron(int blocks, Eigen::Index l);

/// [O, I_bar O G] with `blocks` block rows.
Matrix augmented_observability(const PlantModel& plant, int blocks);

/// Rank test for bounded-observer existence, cross-checked against the
/// row-space test. Throws Error(InternalDisagreement) if they disagree.
ExistenceReport existence_check(const PlantModel& plant, double tol = kDefaultRankTol);

struct DisturbanceEstimate {
  Vector d_hat;
  Box hull;
  std::vector<bool> bounded;
  double diameter = 0.0;
};

// Observable subsystem in decomposed coordinates.
struct ObservableModel {
  Matrix A_o;      // N_o x N_o
  Matrix B_o;      // N_o x q
  Matrix Gamma_o;  // N_o x p
  Matrix C_o;      // l x N_o
};

enum class WindowMode { Recursive, Monolithic };

struct MeasurementRecord {
  Vector u_prev;  // input applied before this measurement (zero-length at k = 0)
  Vector y;
};

/// One prediction-update step of the set-membership filter.
CZ filter_step(const ObservableModel& m, const CZ& posterior, const Vector& u_prev, const CZ& step_set,
               const Vector& y);

/// Posterior after re-filtering the records from the box anchor, applied one step at a time.
CZ refilter_recursive(const ObservableModel& m, const Box& anchor,
                      std::span<const MeasurementRecord> records, const CZ& step_set);

/// Same set as refilter_recursive, assembled directly as one quintuple.
CZ refilter_monolithic(const ObservableModel& m, const Box& anchor,
                       std::span<const MeasurementRecord> records, const CZ& step_set);

// Set-membership disturbance observer. Single owner; one step at a time.
class DisturbanceObserver {
 public:
  /// Throws NotExistent, DeltaTooSmall or InternalDisagreement.
  static DisturbanceObserver build(const PlantModel& plant, const DisturbanceStepModel& dist,
                                   const Box& x0_box, int delta, const Tolerances& tol = {},
                                   WindowMode mode = WindowMode::Recursive);

  /// Consumes y_k (and u_{k-1} for k >= 1). Throws Error(EmptyPosterior).
  DisturbanceEstimate step(const std::optional<Vector>& u_prev, const Vector& y);

  int time() const { return k_; }  // index of the next measurement
  int delta() const { return delta_; }
  const ExistenceReport& existence() const { return report_; }
  const linalg::ObsDecomposition& decomposition() const { return decomp_; }
  const ObservableModel& model() const { return model_; }
  const Matrix& projection() const { return P_; }
  const CZ& initial_prior() const { return prior0_; }
  const CZ& posterior() const { return posterior_; }
  const CZ& disturbance_set() const { return dist_set_; }
  const Box& posterior_hull() const { return post_hulls_.back(); }
  std::size_t window_size() const { return records_.size(); }

 private:
  DisturbanceObserver() = default;

  ExistenceReport report_;
  linalg::ObsDecomposition decomp_;
  ObservableModel model_;
  Matrix P_;
  CZ step_set_;
  CZ prior0_;
  CZ posterior_;
  CZ dist_set_;
  Tolerances tol_;
  WindowMode mode_ = WindowMode::Recursive;
  int delta_ = 1;
  int k_ = 0;
  Eigen::Index p_ = 0;
  Eigen::Index q_ = 0;
  std::deque<MeasurementRecord> records_;  // last min(k, delta) records
  std::deque<Box> post_hulls_;             // hulls of the last delta + 1 posteriors
};

}  // namespace czdo
