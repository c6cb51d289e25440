#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mvlab/error.hpp"
#include "mvlab/solver.hpp"

using namespace mvlab;

namespace {

KernelTable zero_table(const TorusGrid& g) {
  return KernelTable::from_samples(g, std::vector<double>(g.size(), 0.0),
                                   std::vector<double>(g.size(), 0.0));
}

// explicit centred heat update, written out by hand
std::vector<double> heat_step(const std::vector<double>& r, double sigma, double dt, double dx) {
  const std::size_t n = r.size();
  std::vector<double> out(n);
  const double c = 0.5 * sigma * sigma * dt / (dx * dx);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = r[i] + c * (r[(i + 1) % n] - 2 * r[i] + r[(i + n - 1) % n]);
  }
  return out;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SolverConfig centred(double dt) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.scheme = Scheme::CenteredDiffusionUpwindAdvection;
  return cfg;
}

}  // namespace

TEST_CASE("config validation and scheme names") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.cfl_safety = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  for (Scheme s : {Scheme::FullPotentialUpwind, Scheme::CenteredDiffusionUpwindAdvection}) {
    CHECK(parse_scheme(to_string(s)) == s);
  }
  CHECK_FALSE(parse_scheme("rk4").has_value());
}

TEST_CASE("CFL bound") {
  const auto g = make_grid(5.0, 512);
  const auto t = periodize_on_grid(reference_morse(), g);
  const double diffusive = 0.9 * g.dx() * g.dx() / 1.21;
  CHECK(diffusive == doctest::Approx(7.1e-5).epsilon(0.01));
  for (Scheme s : {Scheme::FullPotentialUpwind, Scheme::CenteredDiffusionUpwindAdvection}) {
    SolverConfig cfg;
    cfg.scheme = s;
    CHECK(cfl_max_dt(uniform_density(g), t, 1.1, cfg) == doctest::Approx(diffusive).epsilon(1e-12));
    CHECK(cfl_max_dt(periodized_gaussian(g, 0.0, 0.5), zero_table(g), 1.0, cfg) <=
          0.9 * g.dx() * g.dx() * (1 + 1e-12));
  }
  SolverConfig full;
  CHECK(cfl_max_dt(periodized_gaussian(g, 0.0, 0.5), t, 1.1, full) ==
        doctest::Approx(diffusive).epsilon(1e-12));
  CHECK(cfl_max_dt(uniform_density(g), zero_table(g), 1.0, full) ==
        doctest::Approx(0.9 * g.dx() * g.dx()).epsilon(1e-12));
}

TEST_CASE("step rejects oversized dt") {
  const auto g = make_grid(5.0, 512);
  const auto t = periodize_on_grid(reference_morse(), g);
  SolverConfig cfg;  // dt = 1e-3 is far above the bound
  const auto rho = periodized_gaussian(g, 0.0, 0.5);
  try {
    step(rho, t, 0.838, cfg);
    FAIL("expected StepRejected");
  } catch (const StepRejected& e) {
    CHECK(e.kind() == ErrorKind::StepRejected);
    CHECK(e.admissible_dt() == doctest::Approx(cfl_max_dt(rho, t, 0.838, cfg)));
    CHECK(e.requested_dt() == 1e-3);
  }
}

TEST_CASE("uniform density is a fixed point") {
  const auto g = make_grid(5.0, 512);
  for (const InteractionKernel& k :
       {InteractionKernel{reference_morse()}, InteractionKernel{HegselmannKrauseKernel{0.5}}}) {
    const auto t = periodize_on_grid(k, g);
    for (Scheme s : {Scheme::FullPotentialUpwind, Scheme::CenteredDiffusionUpwindAdvection}) {
      SolverConfig cfg;
      cfg.scheme = s;
      cfg.dt = 5e-5;
      const auto flat = uniform_density(g);
      const auto next = step(flat, t, 0.838, cfg);
      CHECK(max_diff(next.values(), flat.values()) < 1e-14);
    }
  }
}

TEST_CASE("zero kernel reduces to the heat equation") {
  const auto g = make_grid(5.0, 256);
  const auto t = zero_table(g);
  const double sigma = 1.0, dt = 1e-4;
  const auto cfg = centred(dt);
  auto rho = periodized_gaussian(g, 0.3, 0.4);
  std::vector<double> ref(rho.values().begin(), rho.values().end());

  auto once = step(rho, t, sigma, cfg);
  CHECK(max_diff(once.values(), heat_step(ref, sigma, dt, g.dx())) < 1e-14);

  for (int k = 0; k < 100; ++k) {
    rho = step(rho, t, sigma, cfg);
    ref = heat_step(ref, sigma, dt, g.dx());
  }
  CHECK(max_diff(rho.values(), ref) < 1e-12);
}

TEST_CASE("stationarity check") {
  const auto g = make_grid(5.0, 64);
  const auto a = periodized_gaussian(g, 0.0, 0.5);
  CHECK(stationarity_check(a, a, 1e-3, 1e-8));
  auto b = a;
  b[7] += 1.0;
  CHECK_FALSE(stationarity_check(a, b, 1e-3, 1e-8));
}

TEST_CASE("example 1 over 1e4 reported steps keeps the structural invariants") {
  const auto g = make_grid(5.0, 512);
  const auto t = periodize_on_grid(reference_morse(), g);
  EvolveOptions opt;
  opt.t_final = 10.0;
  opt.record_stride = 10;
  opt.snapshot_times = {0.0, 1.0, 5.0, 10.0};
  const auto traj = evolve(periodized_gaussian(g, 0.0, 0.5), t, 0.838, SolverConfig{}, opt);

  CHECK(traj.reported_steps == 10000);
  CHECK(traj.max_mass_drift <= 1e-11);
  CHECK(std::abs(mass(traj.final_field) - 1.0) <= 1e-11);
  CHECK(traj.max_negativity == 0.0);
  CHECK(traj.ledger.max_energy_increase() <= 1e-8);
  CHECK(traj.ledger.size() == 1001);
  REQUIRE(traj.snapshots.size() == 4);
  CHECK(traj.snapshots[1].t == doctest::Approx(1.0));

  for (const auto& snap : traj.snapshots) {
    double asym = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      asym = std::max(asym, std::abs(snap.field[i] - snap.field[g.size() - 1 - i]));
    }
    CHECK(asym <= 1e-12);
  }

  // dF/dt from the ledger against the diagnostic dissipation
  const auto& s = traj.ledger.samples();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double dF = (s[k + 1].free_energy - s[k - 1].free_energy) / (s[k + 1].t - s[k - 1].t);
    if (std::abs(dF) > 1e-4) worst = std::max(worst, std::abs(-dF - s[k].dissipation) / std::abs(dF));
  }
  CHECK(worst < 0.05);

  // peak rises above its initial value before relaxing
  double peak_max = 0.0;
  for (const auto& e : s) peak_max = std::max(peak_max, e.peak);
  CHECK(peak_max > s.front().peak);
}

TEST_CASE("Hegselmann-Krause trajectory stays symmetric and positive") {
  const auto g = make_grid(5.0, 512);
  const auto t = periodize_on_grid(HegselmannKrauseKernel{0.5}, g);
  EvolveOptions opt;
  opt.t_final = 2.0;
  opt.record_stride = 50;
  const auto traj = evolve(periodized_gaussian(g, 0.0, 0.5), t, 0.485, SolverConfig{}, opt);
  CHECK(traj.max_negativity == 0.0);
  CHECK(traj.max_mass_drift <= 1e-12);
  CHECK(traj.ledger.max_energy_increase() <= 1e-8);
  const auto& f = traj.final_field;
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(f[i] - f[g.size() - 1 - i]) <= 1e-12);
}

TEST_CASE("aggregation below sigma_sharp clusters") {
  const auto g = make_grid(5.0, 512);
  const auto t = periodize_on_grid(reference_morse(), g);
  EvolveOptions opt;
  opt.t_final = 5.0;
  opt.record_stride = 100;
  const auto traj = evolve(periodized_gaussian(g, 0.0, 0.5), t, 0.5, SolverConfig{}, opt);
  const auto v = traj.final_field.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  CHECK(*hi - *lo > 0.5);
  CHECK(traj.ledger.max_energy_increase() <= 1e-8);
}

// Clustering amplifies any asymmetry, so mirror data must stay bitwise even.
TEST_CASE("symmetric bimodal data stays exactly symmetric while clustering") {
  const auto g = make_grid(5.0, 512);
  const auto t = periodize_on_grid(reference_morse(), g);
  const std::vector<GaussianComponent> parts{{0.5, 0.5, 0.2}, {0.5, -0.5, 0.2}};
  const auto start = mixture(parts, g);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(start[i] == start[g.size() - 1 - i]);
  for (Scheme scheme : {Scheme::FullPotentialUpwind, Scheme::CenteredDiffusionUpwindAdvection}) {
    SolverConfig cfg;
    cfg.scheme = scheme;
    EvolveOptions opt;
    opt.t_final = 2.0;
    opt.record_stride = 500;
    const auto traj = evolve(start, t, 0.5, cfg, opt);
    const auto& f = traj.final_field;
    double asym = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) asym = std::max(asym, std::abs(f[i] - f[g.size() - 1 - i]));
    CHECK(asym == 0.0);
  }
}

TEST_CASE("evolve stops on a stationary state") {
  const auto g = make_grid(5.0, 128);
  const auto t = periodize_on_grid(reference_morse(), g);
  EvolveOptions opt;
  opt.t_final = 1.0;
  const auto traj = evolve(uniform_density(g), t, 0.838, SolverConfig{}, opt);
  CHECK(traj.stop_reason == StopReason::Stationary);
  CHECK(traj.reported_steps == 1);
  CHECK(traj.ledger.size() == 2);

  opt.stop_when_stationary = false;
  opt.record_stride = 100;
  const auto full = evolve(uniform_density(g), t, 0.838, SolverConfig{}, opt);
  CHECK(full.stop_reason == StopReason::FinalTime);
  CHECK(full.t_stop == doctest::Approx(1.0));
}

TEST_CASE("evolve argument checks") {
  const auto g = make_grid(5.0, 64);
  const auto t = periodize_on_grid(reference_morse(), g);
  EvolveOptions opt;
  opt.t_final = 0.0;
  CHECK_THROWS_AS(evolve(uniform_density(g), t, 1.0, SolverConfig{}, opt), Error);
  opt.t_final = 1.0;
  opt.record_stride = 0;
  CHECK_THROWS_AS(evolve(uniform_density(g), t, 1.0, SolverConfig{}, opt), Error);
  opt.record_stride = 1;
  CHECK_THROWS_AS(evolve(uniform_density(make_grid(5.0, 32)), t, 1.0, SolverConfig{}, opt), Error);
}
