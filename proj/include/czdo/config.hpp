#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "czdo/observer.hpp"
#include "czdo/sim.hpp"

namespace czdo::config {

// Raw quintuple exactly as written in the file (no pruning), kept for round trips.
struct StepCz {
  Matrix G;
  Vector c;
  Matrix A;
  Vector b;
  Vector h;
};

struct PlantSection {
  Matrix phi, gamma, g, xi;
};

struct DisturbanceSection {
  std::optional<Box> step_box;
  std::optional<StepCz> step_cz;
  Box d0_sample_box;
  std::optional<double> diameter_bound;

  CZ step_set() const;
  DisturbanceStepModel model() const;
};

struct ObserverSection {
  std::optional<int> delta;
  std::vector<int> delta_list;
  Tolerances tol;

  /// delta_list, or {delta} when the list is absent.
  std::vector<int> deltas() const;
};

struct ExperimentSection {
  int horizon = 100;
  int runs = 1;
  std::uint64_t seed = 0;
  std::vector<Vector> inputs;  // empty means zero input
};

struct Config {
  PlantSection plant;
  std::optional<DisturbanceSection> disturbance;
  std::optional<Box> x0_box;
  ObserverSection observer;
  ExperimentSection experiment;

  PlantModel plant_model() const;
  /// Requires the disturbance and x0 sections. Throws Error(Config) naming the missing one.
  sim::Scenario scenario() const;
};

/// Throws Error(Config) with a field path such as "plant.phi[4]".
Config parse(const nlohmann::json& j);
Config parse_text(const std::string& text);
Config load(const std::string& path);

nlohmann::json to_json(const Config& c);

}  // namespace czdo::config
