#include "mvlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "mvlab/error.hpp"
#include "spectral.hpp"

namespace mvlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Number of images K such that every image |m| > K contributes less than
// tol in total, given |f(x)| <= amplitude * exp(-|x| / decay).
int exponential_image_count(double length, double amplitude, double decay, double tol) {
  const double ratio = std::exp(-length / decay);
  for (int k = 0; k < 4096; ++k) {
    const double nearest = (k + 0.5) * length;
    const double tail = 2.0 * amplitude * std::exp(-nearest / decay) / (1.0 - ratio);
    if (tail < tol) return k;
  }
  return 4096;
}

}  // namespace

MorseKernel reference_morse(double length) {
  return MorseKernel{4.0, 1.0, 0.025 * length, 0.01 * length};
}

void validate(const InteractionKernel& kernel) {
  std::visit(overloaded{
                 [](const MorseKernel& k) {
                   if (!(k.attraction_strength > 0.0) || !(k.repulsion_strength > 0.0) ||
                       !(k.attraction_length > 0.0) || !(k.repulsion_length > 0.0)) {
                     throw Error(ErrorKind::InvalidConfiguration,
                                 "Morse parameters must all be positive");
                   }
                 },
                 [](const HegselmannKrauseKernel& k) {
                   if (!(k.radius > 0.0)) {
                     throw Error(ErrorKind::InvalidConfiguration,
                                 "Hegselmann-Krause radius must be positive");
                   }
                 },
             },
             kernel);
}

std::string describe(const InteractionKernel& kernel) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const MorseKernel& k) {
                   os << "morse(C_a=" << k.attraction_strength << ", C_r=" << k.repulsion_strength
                      << ", l_a=" << k.attraction_length << ", l_r=" << k.repulsion_length << ")";
                 },
                 [&](const HegselmannKrauseKernel& k) {
                   os << "hegselmann_krause(R_0=" << k.radius << ")";
                 },
             },
             kernel);
  return os.str();
}

double evaluate_free(const InteractionKernel& kernel, double x) {
  const double r = std::abs(x);
  return std::visit(overloaded{
                        [r](const MorseKernel& k) {
                          return -k.attraction_strength * std::exp(-r / k.attraction_length) +
                                 k.repulsion_strength * std::exp(-r / k.repulsion_length);
                        },
                        [r](const HegselmannKrauseKernel& k) {
                          return r <= k.radius ? 0.5 * (r * r - 1.0) : 0.0;
                        },
                    },
                    kernel);
}

double kernel_gradient_free(const InteractionKernel& kernel, double x) {
  if (x == 0.0) return 0.0;
  const double r = std::abs(x);
  const double sign = x > 0.0 ? 1.0 : -1.0;
  return std::visit(
      overloaded{
          [&](const MorseKernel& k) {
            return sign * (k.attraction_strength / k.attraction_length *
                               std::exp(-r / k.attraction_length) -
                           k.repulsion_strength / k.repulsion_length *
                               std::exp(-r / k.repulsion_length));
          },
          [&](const HegselmannKrauseKernel& k) { return r <= k.radius ? x : 0.0; },
      },
      kernel);
}

KernelTable KernelTable::from_samples(const TorusGrid& grid, std::vector<double> u,
                                      std::vector<double> du) {
  if (u.size() != grid.size() || du.size() != grid.size()) {
    throw Error(ErrorKind::IncompatibleGrids, "kernel samples do not match the grid");
  }
  KernelTable table;
  table.grid_ = grid;
  table.u_ = std::move(u);
  table.du_ = std::move(du);
  table.fft_ = detail::shared_real_fft(grid.size());

  const std::size_t n = grid.size();
  std::vector<std::complex<double>> spectrum(table.fft_->spectrum_size());
  table.fft_->forward(table.u_, spectrum);
  table.fourier_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Hermitian symmetry fills the upper half of the spectrum.
    const auto c = k < spectrum.size() ? spectrum[k] : std::conj(spectrum[n - k]);
    table.fourier_[k] = c.real() * grid.dx();
    table.fourier_imag_max_ = std::max(table.fourier_imag_max_, std::abs(c.imag()) * grid.dx());
  }
  return table;
}

KernelTable periodize_on_grid(const InteractionKernel& kernel, const TorusGrid& grid,
                              double image_tol) {
  validate(kernel);
  if (!(image_tol > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "image tolerance must be positive");
  }
  const double length = grid.length();
  int images = 0;
  if (const auto* morse = std::get_if<MorseKernel>(&kernel)) {
    const double decay = std::max(morse->attraction_length, morse->repulsion_length);
    const double amplitude =
        std::max(morse->attraction_strength, morse->repulsion_strength) *
        std::max(1.0, std::max(1.0 / morse->attraction_length, 1.0 / morse->repulsion_length));
    images = exponential_image_count(length, 2.0 * amplitude, decay, image_tol);
  } else {
    const auto& hk = std::get<HegselmannKrauseKernel>(kernel);
    if (hk.radius > 0.5 * length) {
      throw Error(ErrorKind::InvalidConfiguration,
                  "Hegselmann-Krause radius exceeds half the domain length");
    }
  }

  const std::size_t n = grid.size();
  std::vector<double> u(n), du(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = wrap_displacement(length, static_cast<double>(j) * grid.dx());
    double value = evaluate_free(kernel, d);
    double slope = kernel_gradient_free(kernel, d);
    for (int m = 1; m <= images; ++m) {
      value += evaluate_free(kernel, d + m * length) + evaluate_free(kernel, d - m * length);
      slope += kernel_gradient_free(kernel, d + m * length) +
               kernel_gradient_free(kernel, d - m * length);
    }
    u[j] = value;
    du[j] = slope;
  }
  // Both zero and L/2 are their own mirror images; an odd gradient vanishes there.
  du[0] = 0.0;
  if (n % 2 == 0) du[n / 2] = 0.0;
  return KernelTable::from_samples(grid, std::move(u), std::move(du));
}

std::vector<double> convolve(const KernelTable& table, const DensityField& field,
                             ConvolutionMethod method) {
  require_same_grid(table.grid(), field.grid(), "convolve");
  const std::size_t n = field.size();
  const double dx = field.grid().dx();
  const auto u = table.values();
  const auto rho = field.values();
  std::vector<double> out(n, 0.0);

  if (method == ConvolutionMethod::Direct) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += u[(i + n - j) % n] * rho[j];
      out[i] = acc * dx;
    }
    return out;
  }

  // The table is even, so convolution maps even fields to even fields and odd
  // to odd. Convolving the two mirror parts separately and restoring their
  // parity keeps the result exactly mirror-equivariant in floating point;
  // FFT rounding alone would seed asymmetry that clustering then amplifies.
  const auto mirror = [n](std::size_t i) { return n - 1 - i; };
  std::vector<double> even(n), odd(n);
  for (std::size_t i = 0; i < n; ++i) {
    even[i] = 0.5 * (rho[i] + rho[mirror(i)]);
    odd[i] = 0.5 * (rho[i] - rho[mirror(i)]);
  }
  const auto& fft = table.fft();
  const auto fourier = table.fourier();
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<std::complex<double>> spectrum(fft.spectrum_size());
  const auto apply = [&](std::vector<double>& part) {
    fft.forward(part, spectrum);
    for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= fourier[k] * scale;
    fft.inverse(spectrum, part);
  };
  apply(even);
  apply(odd);
  for (std::size_t i = 0; i <= mirror(i); ++i) {
    const std::size_t m = mirror(i);
    const double e = 0.5 * (even[i] + even[m]);
    const double o = 0.5 * (odd[i] - odd[m]);
    out[i] = e + o;
    out[m] = e - o;
  }
  return out;
}

}  // namespace mvlab
