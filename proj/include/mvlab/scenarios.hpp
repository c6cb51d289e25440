#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvlab/config.hpp"
#include "mvlab/observables.hpp"
#include "mvlab/particles.hpp"
#include "mvlab/solver.hpp"
#include "mvlab/stability.hpp"

namespace mvlab {

/// Names accepted by `mvlab scenario`, in a fixed order.
const std::vector<std::string>& preset_names();

/// Config of a PDE preset. Throws Error{Usage} for unknown names and for
/// sweep-sigma-c, which is not a single run.
SimulationConfig preset_config(std::string_view name);

struct RunResult {
  SimulationConfig config;
  Trajectory trajectory;
  RegimeSegmentation segmentation;
  FinalState final_state = FinalState::Homogeneous;
  nlohmann::json summary;
};

RunResult run_simulation(const SimulationConfig& config);

/// ledger.csv, segmentation.json, snapshots.csv, summary.json
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);

struct SweepResult {
  PhaseBracket bracket;
  double sigma_sharp = 0.0;
  nlohmann::json summary;
};

SigmaCOptions default_sweep_options();
SweepResult run_sigma_c_sweep(const SigmaCOptions& options = default_sweep_options());

/// verdicts.csv, summary.json
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

struct ParticleResult {
  SimulationConfig config;
  ParticleRun run;
  nlohmann::json summary;
};

/// Samples particles.count particles from the initial density and evolves
/// them with the solver dt up to t_final.
ParticleResult run_particles(const SimulationConfig& config, std::uint64_t seed);

/// particles.csv (t,peak,m2), summary.json
void write_particle_outputs(const ParticleResult& result, const std::filesystem::path& dir);

}  // namespace mvlab
