#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mvlab/grid.hpp"

namespace mvlab {

namespace detail {
class RealFft;
}

/// U(x) = -C_a exp(-|x|/l_a) + C_r exp(-|x|/l_r)
struct MorseKernel {
  double attraction_strength = 4.0;   // C_a
  double repulsion_strength = 1.0;    // C_r
  double attraction_length = 0.125;   // l_a
  double repulsion_length = 0.05;     // l_r

  friend bool operator==(const MorseKernel&, const MorseKernel&) = default;
};

/// U(x) = (x^2 - 1)/2 for |x| <= R_0, 0 otherwise.
struct HegselmannKrauseKernel {
  double radius = 0.5;

  friend bool operator==(const HegselmannKrauseKernel&,
                         const HegselmannKrauseKernel&) = default;
};

using InteractionKernel = std::variant<MorseKernel, HegselmannKrauseKernel>;

/// Morse parameters used throughout the reference experiments on L = 5.
MorseKernel reference_morse(double length = 5.0);

/// Throws InvalidConfiguration for nonpositive parameters.
void validate(const InteractionKernel& kernel);

std::string describe(const InteractionKernel& kernel);

double evaluate_free(const InteractionKernel& kernel, double x);

/// dU/dx, with the value 0 at the origin and the interior value at the
/// Hegselmann-Krause cutoff.
double kernel_gradient_free(const InteractionKernel& kernel, double x);

/// Periodized kernel sampled at the circular displacements j*dx, its
/// gradient, and its discrete Fourier coefficients. Immutable and cheap to
/// copy (the FFT plan is shared).
class KernelTable {
 public:
  /// Builds a table from raw samples; fourier coefficients are derived from u.
  static KernelTable from_samples(const TorusGrid& grid, std::vector<double> u,
                                  std::vector<double> du);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return u_; }
  std::span<const double> gradients() const noexcept { return du_; }
  /// Real parts of U_k = sum_j u_j exp(-2 pi i k j / n) dx, k = 0..n-1.
  std::span<const double> fourier() const noexcept { return fourier_; }
  /// Largest |Im U_k| observed when the coefficients were computed.
  double fourier_imag_max() const noexcept { return fourier_imag_max_; }

  const detail::RealFft& fft() const noexcept { return *fft_; }

 private:
  KernelTable() = default;

  TorusGrid grid_{1.0, 2};
  std::vector<double> u_;
  std::vector<double> du_;
  std::vector<double> fourier_;
  double fourier_imag_max_ = 0.0;
  std::shared_ptr<const detail::RealFft> fft_;
};

KernelTable periodize_on_grid(const InteractionKernel& kernel, const TorusGrid& grid,
                              double image_tol = kDefaultImageTolerance);

enum class ConvolutionMethod { Spectral, Direct };

/// (U*rho)_i = sum_j u_{(i-j) mod n} rho_j dx
std::vector<double> convolve(const KernelTable& table, const DensityField& field,
                             ConvolutionMethod method = ConvolutionMethod::Spectral);

}  // namespace mvlab
