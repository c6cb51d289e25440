#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "mvlab/energy.hpp"
#include "mvlab/grid.hpp"
#include "mvlab/kernels.hpp"
#include "mvlab/observables.hpp"

namespace mvlab {

enum class Scheme {
  /// Upwinds the full chemical-potential velocity -(mu_{i+1} - mu_i)/dx.
  FullPotentialUpwind,
  /// Upwinds the interaction velocity; centred flux for the diffusion term.
  CenteredDiffusionUpwindAdvection,
};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view text);

struct SolverConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::FullPotentialUpwind;
  double density_floor = kDefaultDensityFloor;
  double cfl_safety = 0.9;
  double stationarity_tol = 1e-8;

  /// Throws InvalidConfiguration when dt <= 0 or cfl_safety is outside (0, 1].
  void validate() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Interface velocities a_{i+1/2} used by the scheme; entry i sits between
/// cells i and i+1.
std::vector<double> interface_velocity(const DensityField& field,
                                       std::span<const double> convolution, double sigma,
                                       const SolverConfig& cfg);

/// Largest explicit step keeping the update nonnegative and stable:
///   CenteredDiffusionUpwindAdvection: safety / (sigma^2/dx^2 + 2 max|a|/dx)
///   FullPotentialUpwind:              safety * min(dx^2/sigma^2, dx / (2 max|a|))
double cfl_max_dt(const DensityField& field, const KernelTable& table, double sigma,
                  const SolverConfig& cfg);

/// One explicit Euler step of size cfg.dt. Throws StepRejected when cfg.dt
/// exceeds cfl_max_dt and NumericalFailure on NaN or negative output.
DensityField step(const DensityField& field, const KernelTable& table, double sigma,
                  const SolverConfig& cfg);

/// max_i |curr_i - prev_i| / dt < tol
bool stationarity_check(const DensityField& prev, const DensityField& curr, double dt,
                        double tol);

/// Energy decomposition plus peak and second moment of a state.
EnergySample measure(const DensityField& field, const KernelTable& table, double sigma,
                     double t, double floor = kDefaultDensityFloor);

struct EvolveOptions {
  double t_final = 1.0;
  /// Record a ledger sample every this many reported steps.
  std::size_t record_stride = 1;
  /// Snapshot times; each is taken at the nearest reported step.
  std::vector<double> snapshot_times;
  /// Stop as soon as stationarity_check fires.
  bool stop_when_stationary = true;
};

struct Snapshot {
  double t = 0.0;
  DensityField field;
};

enum class StopReason { FinalTime, Stationary };

std::string_view to_string(StopReason reason);

struct Trajectory {
  EnergyLedger ledger;
  std::vector<Snapshot> snapshots;
  DensityField final_field;
  StopReason stop_reason = StopReason::FinalTime;
  double t_stop = 0.0;
  std::size_t reported_steps = 0;
  std::size_t substeps = 0;
  /// Largest |mass - initial mass| seen at reported steps.
  double max_mass_drift = 0.0;
  /// Largest negative excursion seen at reported steps (0 when none).
  double max_negativity = 0.0;
};

/// Advances the field to t_final in reported steps of cfg.dt, each split into
/// equal CFL-admissible sub-steps.
Trajectory evolve(const DensityField& initial, const KernelTable& table, double sigma,
                  const SolverConfig& cfg, const EvolveOptions& options);

}  // namespace mvlab
