#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mvlab {

/// Uniform cell-centred mesh of the periodic interval [-L/2, L/2).
class TorusGrid {
 public:
  /// Throws InvalidConfiguration unless length > 0 and n_cells >= 2.
  TorusGrid(double length, std::size_t n_cells);

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return n_cells_; }
  double dx() const noexcept { return dx_; }

  /// x_i = -L/2 + (i + 1/2) dx
  double center(std::size_t i) const noexcept {
    // (i + 1/2 - n/2) is an exact half-integer, so mirrored centers are exact negatives
    return (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(n_cells_)) * dx_;
  }
  std::vector<double> centers() const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  double length_;
  std::size_t n_cells_;
  double dx_;
};

TorusGrid make_grid(double length, std::int64_t n_cells);

/// Minimum-image representative of d in [-L/2, L/2).
double wrap_displacement(double length, double d);

/// Cell-averaged density on a TorusGrid. Construction does not normalize;
/// the factory functions below return unit-mass fields.
class DensityField {
 public:
  explicit DensityField(TorusGrid grid);
  DensityField(TorusGrid grid, std::vector<double> values);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  /// Largest |rho_i| over negative entries; 0 when the field is nonnegative.
  double most_negative() const noexcept;

  friend bool operator==(const DensityField&, const DensityField&) = default;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double std = 1.0;

  friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;
};

inline constexpr double kDefaultImageTolerance = 1e-12;

/// Gaussian wrapped onto the torus by summing shifted images, evaluated at
/// cell centres and renormalized to unit discrete mass.
DensityField periodized_gaussian(const TorusGrid& grid, double mean, double std,
                                 double image_tol = kDefaultImageTolerance);

/// Convex combination of periodized Gaussians; weights must sum to 1.
DensityField mixture(std::span<const GaussianComponent> components, const TorusGrid& grid,
                     double image_tol = kDefaultImageTolerance);

/// Uniform density 1/L.
DensityField uniform_density(const TorusGrid& grid);

double mass(const DensityField& field);

/// Throws IncompatibleGrids when the two grids differ.
void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* context);

}  // namespace mvlab
