#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wegnerlab/estimators.hpp"

namespace wl {

constexpr int kSchemaVersion = 1;

/// Field model from `{"kind": ..., "c0", "tau", "alpha", "gmax", "support",
/// "single_site", "v1", "v2"}`; dimension taken from the grid.
FieldModel parse_field(const nlohmann::json& j, int dim);
GridSpec parse_grid(const nlohmann::json& j);
ConstantFieldGauge parse_gauge(const nlohmann::json& j, int dim);

struct EnergyGrid {
  double min = 0.0;
  double max = 1.0;
  int count = 11;
  std::vector<double> values() const;
};

EnergyGrid parse_energies(const nlohmann::json& j);

struct RunConfig {
  nlohmann::json raw;
  FieldModel field;
  GridSpec grid;
  ConstantFieldGauge gauge;
  std::vector<Boundary> boundaries;
  int realizations = 1;
  std::uint64_t seed = 0;
  std::vector<int> sizes;  // cube sizes in unit cells for `ids run`
  EnergyGrid energies;
  bool staircase = false;

  /// The configured grid rebuilt with `size` unit cells (or cells) per axis.
  GridSpec grid_of_size(int size) const;
};

/// Validates `schema_version` and all keys; throws Error(config).
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace wl
