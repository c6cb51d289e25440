#pragma once

#include <span>
#include <vector>

#include "mvlab/grid.hpp"
#include "mvlab/kernels.hpp"

namespace mvlab {

inline constexpr double kDefaultDensityFloor = 1e-14;

/// One row of an energy ledger.
struct EnergySample {
  double t = 0.0;
  double free_energy = 0.0;   // F = F_ent + F_int
  double entropic = 0.0;      // F_ent
  double interaction = 0.0;   // F_int
  double dissipation = 0.0;   // int rho |d_x mu|^2
  double peak = 0.0;          // max rho
  double second_moment = 0.0;

  friend bool operator==(const EnergySample&, const EnergySample&) = default;
};

/// (sigma^2 / 2) sum rho_i log rho_i dx, with 0 log 0 = 0.
double entropy_energy(const DensityField& field, double sigma);

/// (1/2) sum rho_i (U*rho)_i dx
double interaction_energy(const DensityField& field, const KernelTable& table);
/// Same quantity from a precomputed convolution.
double interaction_energy(const DensityField& field, std::span<const double> convolution);

/// mu_i = (sigma^2/2)(1 + log max(rho_i, floor)) + (U*rho)_i
std::vector<double> chemical_potential(const DensityField& field, const KernelTable& table,
                                       double sigma, double floor = kDefaultDensityFloor);
std::vector<double> chemical_potential(const DensityField& field,
                                       std::span<const double> convolution, double sigma,
                                       double floor = kDefaultDensityFloor);

/// Diagnostic flux J_{i+1/2} = -rho_{i+1/2} (mu_{i+1} - mu_i)/dx with the
/// arithmetic interface mean; entry i is the interface between cells i, i+1.
std::vector<double> flux(const DensityField& field, std::span<const double> mu);

/// sum over interfaces of rho_{i+1/2} ((mu_{i+1} - mu_i)/dx)^2 dx
double dissipation(const DensityField& field, std::span<const double> mu);

}  // namespace mvlab
