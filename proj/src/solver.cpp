#include "mvlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvlab/error.hpp"

namespace mvlab {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::FullPotentialUpwind: return "full_potential_upwind";
    case Scheme::CenteredDiffusionUpwindAdvection: return "centered_diffusion_upwind_advection";
  }
  return "full_potential_upwind";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  for (Scheme s : {Scheme::FullPotentialUpwind, Scheme::CenteredDiffusionUpwindAdvection}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string_view to_string(StopReason reason) {
  return reason == StopReason::Stationary ? "stationary" : "final_time";
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidConfiguration, "solver dt must be positive");
  }
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "cfl_safety must lie in (0, 1]");
  }
  if (!(density_floor > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "density floor must be positive");
  }
  if (!(stationarity_tol > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "stationarity tolerance must be positive");
  }
}

std::vector<double> interface_velocity(const DensityField& field,
                                       std::span<const double> convolution, double sigma,
                                       const SolverConfig& cfg) {
  const std::size_t n = field.size();
  const double dx = field.grid().dx();
  std::vector<double> a(n);
  if (cfg.scheme == Scheme::FullPotentialUpwind) {
    const auto mu = chemical_potential(field, convolution, sigma, cfg.density_floor);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t next = i + 1 == n ? 0 : i + 1;
      a[i] = -(mu[next] - mu[i]) / dx;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t next = i + 1 == n ? 0 : i + 1;
      a[i] = -(convolution[next] - convolution[i]) / dx;
    }
  }
  return a;
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double admissible_dt(std::span<const double> velocity, double sigma, double dx,
                     const SolverConfig& cfg) {
  const double vmax = max_abs(velocity);
  const double diffusive_rate = sigma * sigma / (dx * dx);
  if (cfg.scheme == Scheme::CenteredDiffusionUpwindAdvection) {
    const double rate = diffusive_rate + 2.0 * vmax / dx;
    return rate > 0.0 ? cfg.cfl_safety / rate : std::numeric_limits<double>::infinity();
  }
  const double diffusive = diffusive_rate > 0.0 ? 1.0 / diffusive_rate
                                                : std::numeric_limits<double>::infinity();
  const double advective =
      vmax > 0.0 ? dx / (2.0 * vmax) : std::numeric_limits<double>::infinity();
  return cfg.cfl_safety * std::min(diffusive, advective);
}

// Upwind update written as a combination with nonnegative weights under the
// CFL bound, so the result is nonnegative in floating point as well.
void apply_update(std::vector<double>& rho, std::span<const double> velocity, double sigma,
                  double dx, double h, Scheme scheme) {
  const std::size_t n = rho.size();
  const double lambda = h / dx;
  const double nu = scheme == Scheme::CenteredDiffusionUpwindAdvection
                        ? 0.5 * sigma * sigma * h / (dx * dx)
                        : 0.0;
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t left = i == 0 ? n - 1 : i - 1;
    const std::size_t right = i + 1 == n ? 0 : i + 1;
    const double a_right = velocity[i];
    const double a_left = velocity[left];
    const double stay =
        1.0 - lambda * (std::max(a_right, 0.0) - std::min(a_left, 0.0)) - 2.0 * nu;
    const double from_left = lambda * std::max(a_left, 0.0) + nu;
    const double from_right = -lambda * std::min(a_right, 0.0) + nu;
    // neighbours summed first so mirrored cells round identically
    next[i] = stay * rho[i] + (from_left * rho[left] + from_right * rho[right]);
  }
  rho.swap(next);
}

void check_state(std::span<const double> rho) {
  for (double v : rho) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NumericalFailure, "non-finite density after update");
    }
    if (v < 0.0) {
      throw Error(ErrorKind::NumericalFailure, "negative density after update");
    }
  }
}

// Advances by `duration` in sub-steps that each respect the current CFL bound.
std::size_t advance(DensityField& field, const KernelTable& table, double sigma,
                    const SolverConfig& cfg, double duration) {
  const double dx = field.grid().dx();
  std::vector<double> rho(field.values().begin(), field.values().end());
  double remaining = duration;
  std::size_t substeps = 0;
  while (true) {
    const auto conv = convolve(table, field);
    const auto a = interface_velocity(field, conv, sigma, cfg);
    const double bound = admissible_dt(a, sigma, dx, cfg);
    const double pieces = std::max(1.0, std::ceil(remaining / bound * (1.0 - 1e-12)));
    const double h = pieces <= 1.0 ? remaining : remaining / pieces;
    apply_update(rho, a, sigma, dx, h, cfg.scheme);
    std::copy(rho.begin(), rho.end(), field.values().begin());
    ++substeps;
    if (pieces <= 1.0) break;
    remaining -= h;
  }
  check_state(field.values());
  return substeps;
}

}  // namespace

double cfl_max_dt(const DensityField& field, const KernelTable& table, double sigma,
                  const SolverConfig& cfg) {
  const auto conv = convolve(table, field);
  return admissible_dt(interface_velocity(field, conv, sigma, cfg), sigma, field.grid().dx(),
                       cfg);
}

DensityField step(const DensityField& field, const KernelTable& table, double sigma,
                  const SolverConfig& cfg) {
  cfg.validate();
  require_same_grid(table.grid(), field.grid(), "step");
  const auto conv = convolve(table, field);
  const auto a = interface_velocity(field, conv, sigma, cfg);
  const double bound = admissible_dt(a, sigma, field.grid().dx(), cfg);
  if (cfg.dt > bound) throw StepRejected(cfg.dt, bound);

  std::vector<double> rho(field.values().begin(), field.values().end());
  apply_update(rho, a, sigma, field.grid().dx(), cfg.dt, cfg.scheme);
  check_state(rho);
  return DensityField(field.grid(), std::move(rho));
}

bool stationarity_check(const DensityField& prev, const DensityField& curr, double dt,
                        double tol) {
  require_same_grid(prev.grid(), curr.grid(), "stationarity_check");
  double change = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    change = std::max(change, std::abs(curr[i] - prev[i]));
  }
  return change / dt < tol;
}

EnergySample measure(const DensityField& field, const KernelTable& table, double sigma,
                     double t, double floor) {
  const auto conv = convolve(table, field);
  EnergySample s;
  s.t = t;
  s.entropic = entropy_energy(field, sigma);
  s.interaction = interaction_energy(field, conv);
  s.free_energy = s.entropic + s.interaction;
  s.dissipation = dissipation(field, chemical_potential(field, conv, sigma, floor));
  s.peak = peak_height(field);
  s.second_moment = second_moment(field);
  return s;
}

Trajectory evolve(const DensityField& initial, const KernelTable& table, double sigma,
                  const SolverConfig& cfg, const EvolveOptions& options) {
  cfg.validate();
  require_same_grid(table.grid(), initial.grid(), "evolve");
  if (!(options.t_final > 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "t_final must be positive");
  }
  if (options.record_stride == 0) {
    throw Error(ErrorKind::InvalidConfiguration, "record_stride must be positive");
  }

  const auto n_steps =
      static_cast<std::size_t>(std::max<long long>(1, std::llround(options.t_final / cfg.dt)));

  // Requested snapshot times mapped to reported-step indices.
  std::vector<std::pair<std::size_t, double>> wanted;
  for (double ts : options.snapshot_times) {
    const long long k = std::llround(std::clamp(ts, 0.0, options.t_final) / cfg.dt);
    wanted.emplace_back(std::min<std::size_t>(static_cast<std::size_t>(k), n_steps), ts);
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               wanted.end());
  std::size_t next_snapshot = 0;

  Trajectory traj{EnergyLedger{}, {}, initial, StopReason::FinalTime, 0.0, 0, 0, 0.0, 0.0};
  DensityField& field = traj.final_field;
  const double initial_mass = mass(initial);

  auto take_snapshots = [&](std::size_t k) {
    while (next_snapshot < wanted.size() && wanted[next_snapshot].first == k) {
      traj.snapshots.push_back({static_cast<double>(k) * cfg.dt, field});
      ++next_snapshot;
    }
  };

  traj.ledger.append(measure(field, table, sigma, 0.0, cfg.density_floor));
  take_snapshots(0);

  DensityField previous = field;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    if (options.stop_when_stationary) previous = field;
    traj.substeps += advance(field, table, sigma, cfg, cfg.dt);
    traj.reported_steps = k;
    const double t = static_cast<double>(k) * cfg.dt;
    traj.t_stop = t;
    traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(mass(field) - initial_mass));
    traj.max_negativity = std::max(traj.max_negativity, field.most_negative());

    const bool stationary = options.stop_when_stationary &&
                            stationarity_check(previous, field, cfg.dt, cfg.stationarity_tol);
    if (k % options.record_stride == 0 || k == n_steps || stationary) {
      traj.ledger.append(measure(field, table, sigma, t, cfg.density_floor));
    }
    take_snapshots(k);
    if (stationary) {
      traj.stop_reason = StopReason::Stationary;
      break;
    }
  }
  return traj;
}

}  // namespace mvlab
