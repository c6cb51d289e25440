#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvlab/grid.hpp"
#include "mvlab/kernels.hpp"
#include "mvlab/observables.hpp"
#include "mvlab/solver.hpp"
#include "mvlab/stability.hpp"

namespace mvlab {

struct DomainConfig {
  double length = 5.0;
  std::size_t n_cells = 512;

  friend bool operator==(const DomainConfig&, const DomainConfig&) = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<double> snapshot_times;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ParticleConfig {
  std::size_t count = 10000;
  std::size_t record_stride = 10;

  friend bool operator==(const ParticleConfig&, const ParticleConfig&) = default;
};

/// Everything one run needs. Produced by parse_config or a preset.
struct SimulationConfig {
  std::string name = "custom";
  DomainConfig domain;
  InteractionKernel kernel = reference_morse();
  double sigma = 0.0;
  SolverConfig solver;
  double t_final = 0.0;
  std::size_t record_stride = 10;
  std::vector<GaussianComponent> initial;
  ClassifierSettings classifier;
  double flatness_tol = kDefaultFlatnessTolerance;
  OutputConfig output;
  std::uint64_t seed = 0;
  ParticleConfig particles;

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Parses a JSON document, or a flat document of `dotted.key = value` lines
/// whose values are JSON literals (bare words read as strings). Applies
/// defaults, then validates. Throws Error{Parse} naming the offending key
/// for schema violations and ValidationError with the field path for
/// semantic ones.
SimulationConfig parse_config(std::string_view text);

/// Builds a config from an already-parsed JSON document.
SimulationConfig config_from_json(const nlohmann::json& doc);

/// Inverse of config_from_json (all fields explicit).
nlohmann::json config_to_json(const SimulationConfig& config);

/// Reports every precondition violation; throws ValidationError naming the
/// first offending field.
void validate(const SimulationConfig& config);

}  // namespace mvlab
