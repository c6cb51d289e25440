#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "mvlab/grid.hpp"
#include "mvlab/kernels.hpp"
#include "mvlab/solver.hpp"

namespace mvlab {

/// Largest sigma for which some mode k = 1..k_max of the homogeneous state
/// 1/L is linearly unstable: max_k sqrt(max(0, -2 U_k / L)).
double sigma_sharp(const KernelTable& table, double length, std::size_t k_max = 20);

/// Mode index attaining sigma_sharp (0 when no mode is unstable).
std::size_t sigma_sharp_mode(const KernelTable& table, double length, std::size_t k_max = 20);

enum class FinalState { Homogeneous, Clustered };

std::string_view to_string(FinalState state);

inline constexpr double kDefaultFlatnessTolerance = 1e-3;

FinalState classify_final_state(const DensityField& field,
                                double flatness_tol = kDefaultFlatnessTolerance);

struct ProbeVerdict {
  double sigma = 0.0;
  FinalState state = FinalState::Homogeneous;
  double t_stop = 0.0;
  double contrast = 0.0;  // max rho - min rho at the end of the probe
};

struct PhaseBracket {
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;
  std::size_t iterations = 0;
  std::vector<ProbeVerdict> verdicts;

  double width() const noexcept { return sigma_hi - sigma_lo; }
};

struct SigmaCOptions {
  double probe_std = 0.2;
  std::pair<double, double> bracket{0.70, 1.00};
  double sigma_tol = 0.01;
  double t_max = 30.0;
  double flatness_tol = kDefaultFlatnessTolerance;
  SolverConfig solver{};
};

/// Bisection on sigma between a Clustered lower probe and a Homogeneous
/// upper probe, each probe evolved from a sharp periodized Gaussian centred
/// at 0. Throws InvalidBracket when both ends agree and NonMonotoneVerdicts
/// when a Clustered verdict is recorded above a Homogeneous one.
PhaseBracket estimate_sigma_c(const InteractionKernel& kernel, const TorusGrid& grid,
                              const SigmaCOptions& options = {});

/// True when no Clustered verdict lies above a Homogeneous one.
bool verdicts_monotone(const std::vector<ProbeVerdict>& verdicts);

}  // namespace mvlab
