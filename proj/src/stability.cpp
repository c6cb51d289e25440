#include "mvlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "mvlab/error.hpp"
#include "mvlab/parallel.hpp"

namespace mvlab {

namespace {

std::pair<double, std::size_t> most_unstable(const KernelTable& table, double length,
                                             std::size_t k_max) {
  const auto fourier = table.fourier();
  if (k_max < 1 || 2 * k_max >= fourier.size()) {
    throw Error(ErrorKind::InvalidConfiguration, "k_max must satisfy 1 <= k_max < n/2");
  }
  double best = 0.0;
  std::size_t mode = 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double growth = -2.0 * fourier[k] / length;
    if (growth > best) {
      best = growth;
      mode = k;
    }
  }
  return {std::sqrt(best), mode};
}

}  // namespace

double sigma_sharp(const KernelTable& table, double length, std::size_t k_max) {
  return most_unstable(table, length, k_max).first;
}

std::size_t sigma_sharp_mode(const KernelTable& table, double length, std::size_t k_max) {
  return most_unstable(table, length, k_max).second;
}

std::string_view to_string(FinalState state) {
  return state == FinalState::Homogeneous ? "Homogeneous" : "Clustered";
}

FinalState classify_final_state(const DensityField& field, double flatness_tol) {
  if (!(flatness_tol > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "flatness tolerance must be positive");
  }
  const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());
  return (*hi - *lo) < flatness_tol ? FinalState::Homogeneous : FinalState::Clustered;
}

bool verdicts_monotone(const std::vector<ProbeVerdict>& verdicts) {
  double lowest_homogeneous = INFINITY;
  double highest_clustered = -INFINITY;
  for (const auto& v : verdicts) {
    if (v.state == FinalState::Homogeneous) {
      lowest_homogeneous = std::min(lowest_homogeneous, v.sigma);
    } else {
      highest_clustered = std::max(highest_clustered, v.sigma);
    }
  }
  return highest_clustered < lowest_homogeneous;
}

PhaseBracket estimate_sigma_c(const InteractionKernel& kernel, const TorusGrid& grid,
                              const SigmaCOptions& options) {
  auto [lo, hi] = options.bracket;
  if (!(lo > 0.0) || !(lo < hi)) {
    throw Error(ErrorKind::InvalidConfiguration, "sigma bracket must satisfy 0 < lo < hi");
  }
  if (!(options.sigma_tol > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "sigma tolerance must be positive");
  }
  const auto table = periodize_on_grid(kernel, grid);
  const auto probe = periodized_gaussian(grid, 0.0, options.probe_std);

  EvolveOptions evolve_options;
  evolve_options.t_final = options.t_max;
  evolve_options.record_stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.t_max / options.solver.dt)));

  PhaseBracket bracket;
  auto probe_at = [&](double sigma) {
    const auto traj = evolve(probe, table, sigma, options.solver, evolve_options);
    const auto [mn, mx] = std::minmax_element(traj.final_field.values().begin(),
                                              traj.final_field.values().end());
    return ProbeVerdict{sigma, classify_final_state(traj.final_field, options.flatness_tol),
                        traj.t_stop, *mx - *mn};
  };
  auto run_probe = [&](double sigma) {
    bracket.verdicts.push_back(probe_at(sigma));
    return bracket.verdicts.back().state;
  };

  // the two ends are independent
  if (thread_count() > 1) {
    auto upper = std::async(std::launch::async, probe_at, hi);
    bracket.verdicts.push_back(probe_at(lo));
    bracket.verdicts.push_back(upper.get());
  } else {
    bracket.verdicts.push_back(probe_at(lo));
    bracket.verdicts.push_back(probe_at(hi));
  }
  const FinalState at_lo = bracket.verdicts[0].state;
  const FinalState at_hi = bracket.verdicts[1].state;
  if (at_lo == at_hi) {
    std::ostringstream os;
    os << "both bracket ends (" << lo << ", " << hi << ") end " << to_string(at_lo);
    throw Error(ErrorKind::InvalidBracket, os.str());
  }
  if (at_lo == FinalState::Homogeneous) {
    throw Error(ErrorKind::NonMonotoneVerdicts,
                "lower bracket end relaxed to the homogeneous state while the upper end "
                "stayed clustered; increase t_max");
  }

  while (hi - lo >= options.sigma_tol) {
    const double mid = 0.5 * (lo + hi);
    if (run_probe(mid) == FinalState::Clustered) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++bracket.iterations;
  }
  if (!verdicts_monotone(bracket.verdicts)) {
    throw Error(ErrorKind::NonMonotoneVerdicts,
                "a clustered verdict lies above a homogeneous one; increase t_max");
  }
  bracket.sigma_lo = lo;
  bracket.sigma_hi = hi;
  return bracket;
}

}  // namespace mvlab
