#include "spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace mvlab::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n), forward_plan_(nullptr), inverse_plan_(nullptr) {
  std::lock_guard lock(planner_mutex());
  std::vector<double> real(n);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_r2c_1d(
      len, real.data(), reinterpret_cast<fftw_complex*>(spec.data()), flags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(
      len, reinterpret_cast<fftw_complex*>(spec.data()), real.data(), flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw std::runtime_error("FFTW planning failed");
  }
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  // r2c plans do not modify their input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<std::complex<double>> in, std::span<double> out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

std::shared_ptr<const RealFft> shared_real_fft(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::weak_ptr<const RealFft>> cache;
  std::lock_guard lock(cache_mutex);
  if (auto hit = cache[n].lock()) return hit;
  auto fresh = std::make_shared<const RealFft>(n);
  cache[n] = fresh;
  return fresh;
}

}  // namespace mvlab::detail
