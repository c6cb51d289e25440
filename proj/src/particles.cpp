#include "mvlab/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mvlab/error.hpp"
#include "mvlab/observables.hpp"
#include "mvlab/parallel.hpp"

namespace mvlab {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// SplitMix64 as a UniformRandomBitGenerator; seeded per (seed, step, particle).
struct SplitMixEngine {
  using result_type = std::uint64_t;
  std::uint64_t state;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

constexpr std::size_t kDirectThreshold = 64;

void direct_force(std::span<const double> x, double length, const InteractionKernel& kernel,
                  std::span<double> force) {
  const std::size_t n = x.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        acc += kernel_gradient_free(kernel, wrap_displacement(length, x[i] - x[j]));
      }
      force[i] = acc * inv_n;
    }
  }, 64);
}

// Sorted positions replicated one period to each side; targets are the
// middle block [n, 2n).
std::vector<double> tripled(std::span<const double> sorted, double length) {
  const std::size_t n = sorted.size();
  std::vector<double> ys(3 * n);
  for (std::size_t k = 0; k < n; ++k) {
    ys[k] = sorted[k] - length;
    ys[n + k] = sorted[k];
    ys[2 * n + k] = sorted[k] + length;
  }
  return ys;
}

// For each middle-block target g:
//   left[g]  = sum over k with 0 < y_g - y_k <  L/2 of exp(-(y_g - y_k)/decay)
//   right[g] = sum over k with 0 < y_k - y_g <= L/2 of exp(-(y_k - y_g)/decay)
// Window sums are carried by exponential decay so each step costs O(1)
// amortized; coincident particles never enter their own window.
void exponential_window_sums(std::span<const double> ys, std::size_t n, double length,
                             double decay, std::span<double> left, std::span<double> right) {
  const double half = 0.5 * length;
  {
    double sum = 0.0;
    std::size_t pending = 0;  // elements sitting exactly at `ref`
    std::size_t tail = 0;     // first element still inside the window
    std::size_t g = 0;
    while (ys[g] <= ys[n] - half) ++g;
    tail = g;
    double ref = ys[g];
    for (; g < 2 * n; ++g) {
      if (ys[g] > ref) {
        sum = (sum + static_cast<double>(pending)) * std::exp(-(ys[g] - ref) / decay);
        pending = 0;
        ref = ys[g];
      }
      while (tail < g && ys[g] - ys[tail] >= half) {
        sum -= std::exp(-(ys[g] - ys[tail]) / decay);
        ++tail;
      }
      if (g >= n) left[g - n] = std::max(sum, 0.0);
      ++pending;
    }
  }
  {
    double sum = 0.0;
    std::size_t pending = 0;
    std::size_t tail = 3 * n - 1;
    std::size_t g = 3 * n - 1;
    while (ys[g] > ys[2 * n - 1] + half) --g;
    tail = g;
    double ref = ys[g];
    for (;; --g) {
      if (ys[g] < ref) {
        sum = (sum + static_cast<double>(pending)) * std::exp(-(ref - ys[g]) / decay);
        pending = 0;
        ref = ys[g];
      }
      while (tail > g && ys[tail] - ys[g] > half) {
        sum -= std::exp(-(ys[tail] - ys[g]) / decay);
        --tail;
      }
      if (g < 2 * n) right[g - n] = std::max(sum, 0.0);
      ++pending;
      if (g == n) break;
    }
  }
}

void sorted_force(std::span<const double> x, double length, const InteractionKernel& kernel,
                  std::span<double> force) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && a < b);
  });
  std::vector<double> sorted(n);
  for (std::size_t k = 0; k < n; ++k) sorted[k] = x[order[k]];
  const auto ys = tripled(sorted, length);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> by_rank(n, 0.0);

  if (const auto* morse = std::get_if<MorseKernel>(&kernel)) {
    std::vector<double> left(n), right(n);
    exponential_window_sums(ys, n, length, morse->attraction_length, left, right);
    const double ca = morse->attraction_strength / morse->attraction_length;
    for (std::size_t k = 0; k < n; ++k) by_rank[k] = ca * (left[k] - right[k]);
    exponential_window_sums(ys, n, length, morse->repulsion_length, left, right);
    const double cr = morse->repulsion_strength / morse->repulsion_length;
    for (std::size_t k = 0; k < n; ++k) by_rank[k] -= cr * (left[k] - right[k]);
  } else {
    // dU(d) = d inside the radius: a windowed count and sum of positions.
    const double radius = std::get<HegselmannKrauseKernel>(kernel).radius;
    const bool full_half = radius >= 0.5 * length;
    std::size_t lo = 0, hi = 0;
    double window = 0.0;
    for (std::size_t g = n; g < 2 * n; ++g) {
      const double y = ys[g];
      while (hi < 3 * n && ys[hi] <= y + radius) window += ys[hi++];
      while (lo < hi && (full_half ? ys[lo] <= y - radius : ys[lo] < y - radius)) {
        window -= ys[lo++];
      }
      // Recompute the window sum from scratch now and then to shed drift.
      if ((g - n) % 1024 == 0) window = std::accumulate(ys.begin() + lo, ys.begin() + hi, 0.0);
      by_rank[g - n] = static_cast<double>(hi - lo) * y - window;
    }
  }
  for (std::size_t k = 0; k < n; ++k) force[order[k]] = by_rank[k] * inv_n;
}

}  // namespace

ParticleEnsemble sample_from_density(const DensityField& field, std::size_t n,
                                     std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidConfiguration, "particle count must be positive");
  const auto& grid = field.grid();
  std::vector<double> cdf(field.size());
  double running = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    running += std::max(field[i], 0.0);
    cdf[i] = running;
  }
  if (!(running > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "cannot sample from a field with zero mass");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ParticleEnsemble ens;
  ens.length = grid.length();
  ens.seed = seed;
  ens.positions.resize(n);
  for (auto& x : ens.positions) {
    const double target = unit(rng) * running;
    // upper_bound never lands on an empty cell; the fallback for a target
    // rounded up to the total walks back to the last occupied one.
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) {
      it = std::lower_bound(cdf.begin(), cdf.end(), running);
    }
    const auto cell = static_cast<std::size_t>(it - cdf.begin());
    const double left = grid.center(cell) - 0.5 * grid.dx();
    x = wrap_displacement(grid.length(), left + unit(rng) * grid.dx());
  }
  return ens;
}

double noise_draw(std::uint64_t seed, std::uint64_t step, std::uint64_t particle) {
  SplitMixEngine engine{splitmix(splitmix(splitmix(seed) ^ step) ^ particle)};
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(engine);
}

std::vector<double> mean_field_force(const ParticleEnsemble& ens, const InteractionKernel& kernel,
                                     ForceMethod method) {
  std::vector<double> force(ens.size(), 0.0);
  if (ens.size() < 2) return force;
  if (const auto* hk = std::get_if<HegselmannKrauseKernel>(&kernel);
      hk != nullptr && hk->radius > 0.5 * ens.length) {
    throw Error(ErrorKind::InvalidConfiguration,
                "Hegselmann-Krause radius exceeds half the domain length");
  }
  if (method == ForceMethod::Auto) {
    method = ens.size() <= kDirectThreshold ? ForceMethod::Direct : ForceMethod::Sorted;
  }
  if (method == ForceMethod::Direct) {
    direct_force(ens.positions, ens.length, kernel, force);
  } else {
    sorted_force(ens.positions, ens.length, kernel, force);
  }
  return force;
}

ParticleEnsemble em_step(const ParticleEnsemble& ens, const InteractionKernel& kernel,
                         double sigma, double dt, ForceMethod method) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidConfiguration, "dt must be positive");
  const auto force = mean_field_force(ens, kernel, method);
  ParticleEnsemble next = ens;
  const double kick = sigma * std::sqrt(dt);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const double noise = sigma == 0.0 ? 0.0 : kick * noise_draw(ens.seed, ens.steps, i);
    next.positions[i] = wrap_displacement(ens.length, ens.positions[i] - dt * force[i] + noise);
  }
  next.steps = ens.steps + 1;
  next.t = ens.t + dt;
  return next;
}

DensityField empirical_histogram(const ParticleEnsemble& ens, const TorusGrid& grid) {
  if (std::abs(ens.length - grid.length()) > 1e-12 * grid.length()) {
    throw Error(ErrorKind::IncompatibleGrids, "ensemble and grid lengths differ");
  }
  if (ens.size() == 0) {
    throw Error(ErrorKind::InvalidConfiguration, "histogram of an empty ensemble");
  }
  std::vector<double> counts(grid.size(), 0.0);
  const double half = 0.5 * grid.length();
  for (double x : ens.positions) {
    auto cell = static_cast<long long>(std::floor((x + half) / grid.dx()));
    cell = std::clamp<long long>(cell, 0, static_cast<long long>(grid.size()) - 1);
    counts[static_cast<std::size_t>(cell)] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(ens.size()) * grid.dx());
  for (double& c : counts) c *= scale;
  return DensityField(grid, std::move(counts));
}

double empirical_second_moment(const ParticleEnsemble& ens) {
  double acc = 0.0;
  for (double x : ens.positions) acc += x * x;
  return acc / static_cast<double>(ens.size());
}

ParticleRun evolve_particles(ParticleEnsemble ens, const InteractionKernel& kernel, double sigma,
                             double dt, double t_final, const TorusGrid& grid,
                             std::size_t record_stride, ForceMethod method) {
  if (!(t_final > 0.0)) throw Error(ErrorKind::InvalidConfiguration, "t_final must be positive");
  if (record_stride == 0) {
    throw Error(ErrorKind::InvalidConfiguration, "record_stride must be positive");
  }
  validate(kernel);
  const auto n_steps =
      static_cast<std::uint64_t>(std::max<long long>(1, std::llround(t_final / dt)));
  const double t0 = ens.t;
  ParticleRun run;
  auto observe = [&](const ParticleEnsemble& e) {
    run.series.push_back(
        {e.t, peak_height(empirical_histogram(e, grid)), empirical_second_moment(e)});
  };
  observe(ens);
  for (std::uint64_t k = 1; k <= n_steps; ++k) {
    ens = em_step(ens, kernel, sigma, dt, method);
    ens.t = t0 + static_cast<double>(k) * dt;
    if (k % record_stride == 0 || k == n_steps) observe(ens);
  }
  run.final_ensemble = std::move(ens);
  return run;
}

}  // namespace mvlab
