#include "mvlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mvlab/error.hpp"

namespace mvlab {

TorusGrid::TorusGrid(double length, std::size_t n_cells)
    : length_(length), n_cells_(n_cells), dx_(0.0) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorKind::InvalidConfiguration, "domain length must be positive");
  }
  if (n_cells < 2) {
    throw Error(ErrorKind::InvalidConfiguration, "grid needs at least 2 cells");
  }
  dx_ = length_ / static_cast<double>(n_cells_);
}

std::vector<double> TorusGrid::centers() const {
  std::vector<double> x(n_cells_);
  for (std::size_t i = 0; i < n_cells_; ++i) x[i] = center(i);
  return x;
}

TorusGrid make_grid(double length, std::int64_t n_cells) {
  if (n_cells < 2) {
    throw Error(ErrorKind::InvalidConfiguration,
                "grid needs at least 2 cells, got " + std::to_string(n_cells));
  }
  return TorusGrid(length, static_cast<std::size_t>(n_cells));
}

double wrap_displacement(double length, double d) {
  const double half = 0.5 * length;
  double r = d - length * std::floor((d + half) / length);
  // floor() can land one period off when d + L/2 rounds onto a multiple of L.
  if (r >= half) r -= length;
  if (r < -half) r += length;
  return r;
}

DensityField::DensityField(TorusGrid grid)
    : grid_(grid), values_(grid.size(), 0.0) {}

DensityField::DensityField(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorKind::IncompatibleGrids, "field has " + std::to_string(values_.size()) +
                                                  " values for a grid of " +
                                                  std::to_string(grid_.size()) + " cells");
  }
}

double DensityField::most_negative() const noexcept {
  double worst = 0.0;
  for (double v : values_) worst = std::min(worst, v);
  return -worst;
}

namespace {

// Image count K such that the mass of all images with |n| > K that falls
// inside the domain is below tol.
int gaussian_image_count(double length, double mean, double std, double tol) {
  constexpr int kMaxImages = 1 << 20;
  for (int k = 0; k < kMaxImages; ++k) {
    const double gap = (k + 0.5) * length - std::abs(mean);
    if (gap > 0.0 && std::erfc(gap / (std * std::numbers::sqrt2)) < tol) return k;
  }
  return kMaxImages;
}

void normalize(std::vector<double>& values, double dx) {
  // Summed in mirror pairs so a field and its reflection get the same scale.
  const std::size_t n = values.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) total += values[i] + values[n - 1 - i];
  if (n % 2 == 1) total += values[n / 2];
  total *= dx;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::NumericalFailure, "cannot normalize a field with zero mass");
  }
  const double scale = 1.0 / total;
  for (double& v : values) v *= scale;
}

std::vector<double> gaussian_images(const TorusGrid& grid, double mean, double std,
                                    double image_tol) {
  if (!(std > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "Gaussian standard deviation must be positive");
  }
  if (!(image_tol > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "image tolerance must be positive");
  }
  const double length = grid.length();
  const int images = gaussian_image_count(length, mean, std, image_tol);
  const double norm = 1.0 / (std * std::sqrt(2.0 * std::numbers::pi));
  const double inv_two_var = 1.0 / (2.0 * std * std);
  auto phi = [&](double z) { return norm * std::exp(-z * z * inv_two_var); };

  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = grid.center(i) - mean;
    // Paired images keep mirror-symmetric inputs bitwise symmetric.
    double acc = phi(z);
    for (int n = 1; n <= images; ++n) acc += phi(z + n * length) + phi(z - n * length);
    values[i] = acc;
  }
  return values;
}

}  // namespace

DensityField periodized_gaussian(const TorusGrid& grid, double mean, double std,
                                 double image_tol) {
  auto values = gaussian_images(grid, mean, std, image_tol);
  normalize(values, grid.dx());
  return DensityField(grid, std::move(values));
}

DensityField mixture(std::span<const GaussianComponent> components, const TorusGrid& grid,
                     double image_tol) {
  if (components.empty()) {
    throw Error(ErrorKind::InvalidConfiguration, "mixture needs at least one component");
  }
  double total_weight = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) {
      throw Error(ErrorKind::InvalidConfiguration, "mixture weights must be positive");
    }
    total_weight += c.weight;
  }
  if (std::abs(total_weight - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidConfiguration,
                "mixture weights sum to " + std::to_string(total_weight) + ", expected 1");
  }

  std::vector<double> values(grid.size(), 0.0);
  for (const auto& c : components) {
    auto part = gaussian_images(grid, c.mean, c.std, image_tol);
    normalize(part, grid.dx());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += c.weight * part[i];
  }
  normalize(values, grid.dx());
  return DensityField(grid, std::move(values));
}

DensityField uniform_density(const TorusGrid& grid) {
  return DensityField(grid, std::vector<double>(grid.size(), 1.0 / grid.length()));
}

double mass(const DensityField& field) {
  const auto v = field.values();
  return std::accumulate(v.begin(), v.end(), 0.0) * field.grid().dx();
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* context) {
  if (!(a == b)) {
    throw Error(ErrorKind::IncompatibleGrids, std::string(context) + ": grids differ");
  }
}

}  // namespace mvlab
