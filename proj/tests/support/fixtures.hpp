#pragma once

#include <random>
#include <string>

#include "czdo/observer.hpp"
#include "czdo/sim.hpp"

namespace fixtures {

using czdo::Box;
using czdo::Matrix;
using czdo::Vector;

// Three-state, two-disturbance, two-output benchmark plant.
inline czdo::PlantModel example3(bool blind = false) {
  Matrix phi(3, 3);
  phi << 0.9630, 0.0181, 0.0187, 0.1808, 0.8195, -0.0514, -0.1116, 0.0344, 0.9586;
  Matrix g(3, 2);
  g << 0.0996, 0.0213, 0.0050, 0.1277, 0.1510, 0.0406;
  Matrix xi(2, 3);
  xi << 1, 0, -1, -1, 1, 1;
  if (blind) xi.setZero();
  return czdo::PlantModel(phi, Matrix::Zero(3, 1), g, xi);
}

inline czdo::PlantModel scalar(double phi, double gamma = 0.0) {
  return czdo::PlantModel(Matrix::Constant(1, 1, phi), Matrix::Constant(1, 1, gamma),
                          Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0));
}

inline Box cube(Eigen::Index n, double r) { return Box(Vector::Constant(n, -r), Vector::Constant(n, r)); }

inline czdo::sim::Scenario example3_scenario(int horizon, int runs, std::uint64_t seed,
                                             std::vector<int> deltas = {3}) {
  czdo::sim::Scenario s{example3(),
                        czdo::DisturbanceStepModel::from_box(cube(2, 1.0)),
                        cube(3, 1.0),
                        cube(2, 10.0),
                        {},
                        horizon,
                        std::move(deltas),
                        runs,
                        seed,
                        {}};
  return s;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

// Random small plant (n <= 3, q = 1, 1 <= l <= n) that passes the existence check
// and has observability index at most max_mu.
inline czdo::PlantModel random_existent_plant(std::mt19937_64& rng, int max_mu = 3) {
  std::uniform_int_distribution<int> dim(1, 3);
  for (;;) {
    const int n = dim(rng);
    const int l = std::uniform_int_distribution<int>(1, n)(rng);
    Matrix phi = random_matrix(rng, n, n, 0.9);
    Matrix gamma = random_matrix(rng, n, 1);
    Matrix g = random_matrix(rng, n, 1);
    Matrix xi = random_matrix(rng, l, n);
    if (g.norm() < 0.1) continue;
    czdo::PlantModel plant(phi, gamma, g, xi);
    const auto r = czdo::existence_check(plant);
    if (r.exists && r.mu_o <= max_mu) return plant;
  }
}

inline czdo::sim::Scenario random_scenario(std::mt19937_64& rng, int horizon, std::uint64_t seed) {
  czdo::PlantModel plant = random_existent_plant(rng);
  const double step = std::uniform_real_distribution<double>(0.2, 1.5)(rng);
  const double x0r = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
  czdo::sim::Scenario s{plant,
                        czdo::DisturbanceStepModel::from_box(cube(1, step)),
                        cube(plant.n(), x0r),
                        cube(1, 3.0),
                        {},
                        horizon,
                        {},
                        1,
                        seed,
                        {}};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < horizon; ++k) s.inputs.push_back(Vector::Constant(plant.p(), u(rng)));
  return s;
}

}  // namespace fixtures
