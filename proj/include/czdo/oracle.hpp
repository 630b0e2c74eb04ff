#pragma once

#include <vector>

#include "czdo/czono.hpp"
#include "czdo/observer.hpp"

namespace czdo::oracle {

// Full-information consistency problem over one trajectory. Decision
// variables are x_0, d_0 (free) and the generator coordinates of every
// disturbance step; the state recursion is expanded linearly.
struct TrajectoryLp {
  const PlantModel* plant = nullptr;
  const CZ* step_set = nullptr;  // outer bound of each increment d_{j+1} - d_j
  Box x0_box;
  std::vector<Vector> inputs;        // u_0 .. u_{k-1}
  std::vector<Vector> measurements;  // y_0 .. y_k
};

/// Exact interval hull of the disturbance values d_k consistent with all data
/// up to k = measurements.size() - 1. Throws Error(InfeasibleTrajectory).
Box exact_posterior_hull(const TrajectoryLp& tlp, const lp::Options& opts = {});

}  // namespace czdo::oracle
