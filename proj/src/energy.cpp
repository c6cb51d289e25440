#include "mvlab/energy.hpp"

#include <algorithm>
#include <cmath>

#include "mvlab/error.hpp"

namespace mvlab {

namespace {
void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::IncompatibleGrids, std::string(what) + ": length mismatch");
  }
}
}  // namespace

double entropy_energy(const DensityField& field, double sigma) {
  double acc = 0.0;
  for (double r : field.values()) {
    if (r > 0.0) acc += r * std::log(r);
  }
  return 0.5 * sigma * sigma * acc * field.grid().dx();
}

double interaction_energy(const DensityField& field, std::span<const double> convolution) {
  require_length(convolution.size(), field.size(), "interaction_energy");
  double acc = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) acc += field[i] * convolution[i];
  return 0.5 * acc * field.grid().dx();
}

double interaction_energy(const DensityField& field, const KernelTable& table) {
  return interaction_energy(field, convolve(table, field));
}

std::vector<double> chemical_potential(const DensityField& field,
                                       std::span<const double> convolution, double sigma,
                                       double floor) {
  require_length(convolution.size(), field.size(), "chemical_potential");
  if (!(floor > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "density floor must be positive");
  }
  const double diffusion = 0.5 * sigma * sigma;
  std::vector<double> mu(field.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    mu[i] = diffusion * (1.0 + std::log(std::max(field[i], floor))) + convolution[i];
  }
  return mu;
}

std::vector<double> chemical_potential(const DensityField& field, const KernelTable& table,
                                       double sigma, double floor) {
  return chemical_potential(field, convolve(table, field), sigma, floor);
}

std::vector<double> flux(const DensityField& field, std::span<const double> mu) {
  require_length(mu.size(), field.size(), "flux");
  const std::size_t n = field.size();
  const double dx = field.grid().dx();
  std::vector<double> j(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = i + 1 == n ? 0 : i + 1;
    const double rho_face = 0.5 * (field[i] + field[next]);
    j[i] = -rho_face * (mu[next] - mu[i]) / dx;
  }
  return j;
}

double dissipation(const DensityField& field, std::span<const double> mu) {
  require_length(mu.size(), field.size(), "dissipation");
  const std::size_t n = field.size();
  const double dx = field.grid().dx();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = i + 1 == n ? 0 : i + 1;
    const double rho_face = 0.5 * (field[i] + field[next]);
    const double grad = (mu[next] - mu[i]) / dx;
    acc += rho_face * grad * grad;
  }
  return acc * dx;
}

}  // namespace mvlab
