#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mvlab::detail {

/// Real-to-complex / complex-to-real transforms of a fixed length backed by
/// FFTW. Plans are created once under a global lock and executed on caller
/// buffers, so a single instance may be shared across threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

  /// Unnormalized forward DFT: X_k = sum_j x_j exp(-2 pi i k j / n).
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Unnormalized inverse; clobbers `in`.
  void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

std::shared_ptr<const RealFft> shared_real_fft(std::size_t n);

}  // namespace mvlab::detail
