#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "czdo/observer.hpp"

namespace czdo::sim {

struct Scenario {
  PlantModel plant;
  DisturbanceStepModel dist;
  Box x0_box;    // sampling range of x_0 and the observer's prior
  Box d0_range;  // sampling range of the true d_0; the observer still assumes R^q
  std::vector<Vector> inputs;  // u_0 .. u_{K-1}; empty means zero input
  int horizon = 1;             // K
  std::vector<int> deltas;
  int runs = 1;
  std::uint64_t seed = 0;
  Tolerances tol;

  Vector input(int k) const;
};

struct Trajectory {
  std::vector<Vector> x;   // K + 1
  std::vector<Vector> d;   // K + 1
  std::vector<Vector> u;   // K
  std::vector<Vector> y;   // K + 1
  std::vector<Vector> dd;  // K increments
};

/// Deterministic in (scenario.seed, run_index). Throws Error(RejectionStall).
Trajectory generate_trajectory(const Scenario& s, int run_index);

struct Trace {
  std::vector<Vector> d_true;
  std::vector<Vector> d_hat;
  std::vector<double> err_inf;  // +inf while any hull dimension is unbounded
  std::vector<Box> hull;
  std::vector<double> hull_diam;
  std::vector<std::vector<bool>> bounded;

  std::size_t size() const { return d_true.size(); }
};

/// Runs the observer along one sampled trajectory and audits d_k in Z_k^d at
/// every step (Error(ContainmentViolation) on failure).
Trace run_trace(const Scenario& s, int delta, int run_index);

/// Same, with a prebuilt observer prototype (copied) and a given trajectory.
Trace run_trace(const Scenario& s, const DisturbanceObserver& prototype, const Trajectory& traj);

struct DeltaSummary {
  int delta = 0;
  int warmup = 0;  // first k included in the aggregate
  std::vector<double> mean_err;  // per k over runs
  std::vector<double> max_err;
  double mean_agg = 0.0;  // over runs and k in [warmup, K]
  double max_agg = 0.0;
};

struct MonteCarloSummary {
  std::uint64_t seed = 0;
  int runs = 0;
  int horizon = 0;
  std::string distribution;
  std::vector<DeltaSummary> per_delta;
};

/// Runs are distributed over `threads` workers (0 = hardware concurrency);
/// the result does not depend on the thread count.
MonteCarloSummary monte_carlo(const Scenario& s, int threads = 1);

/// Name of the increment sampling scheme recorded in outputs.
std::string sampling_description(const Scenario& s);

}  // namespace czdo::sim
