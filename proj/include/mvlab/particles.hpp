#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mvlab/grid.hpp"
#include "mvlab/kernels.hpp"

namespace mvlab {

/// Positions on [-L/2, L/2) plus the identity of their random stream.
struct ParticleEnsemble {
  std::vector<double> positions;
  double length = 5.0;
  std::uint64_t seed = 0;
  double t = 0.0;
  /// Number of Euler-Maruyama steps taken; indexes the noise stream.
  std::uint64_t steps = 0;

  std::size_t size() const noexcept { return positions.size(); }
};

/// N iid draws from the piecewise-constant density (cell by inverse CDF,
/// uniform inside the cell). Deterministic in (field, N, seed).
ParticleEnsemble sample_from_density(const DensityField& field, std::size_t n,
                                     std::uint64_t seed);

/// Standard normal draw for (seed, step, particle). Each triple owns an
/// independent substream, so results do not depend on evaluation order.
double noise_draw(std::uint64_t seed, std::uint64_t step, std::uint64_t particle);

enum class ForceMethod {
  /// Sorted sweep for ensembles above a small size, direct otherwise.
  Auto,
  /// O(N^2) pair loop over minimum-image displacements.
  Direct,
  /// O(N log N) sorted sliding-window sums; exact for both kernel families.
  Sorted,
};

/// F_i = (1/N) sum_j dU(wrap(X_i - X_j)), with dU(0) = 0.
std::vector<double> mean_field_force(const ParticleEnsemble& ens, const InteractionKernel& kernel,
                                     ForceMethod method = ForceMethod::Auto);

/// X_i <- wrap(X_i - dt F_i + sigma sqrt(dt) xi_i)
ParticleEnsemble em_step(const ParticleEnsemble& ens, const InteractionKernel& kernel,
                         double sigma, double dt, ForceMethod method = ForceMethod::Auto);

/// Counts per cell divided by N dx. Throws IncompatibleGrids when the
/// ensemble and grid lengths differ.
DensityField empirical_histogram(const ParticleEnsemble& ens, const TorusGrid& grid);

/// (1/N) sum X_i^2
double empirical_second_moment(const ParticleEnsemble& ens);

struct ParticleObservation {
  double t = 0.0;
  double peak = 0.0;           // max of the histogram
  double second_moment = 0.0;  // empirical
};

struct ParticleRun {
  std::vector<ParticleObservation> series;
  ParticleEnsemble final_ensemble;
};

ParticleRun evolve_particles(ParticleEnsemble ens, const InteractionKernel& kernel, double sigma,
                             double dt, double t_final, const TorusGrid& grid,
                             std::size_t record_stride, ForceMethod method = ForceMethod::Auto);

}  // namespace mvlab
