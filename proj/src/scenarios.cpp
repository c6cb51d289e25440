#include "mvlab/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "mvlab/error.hpp"
#include "mvlab/io.hpp"

namespace mvlab {

namespace {

constexpr std::string_view kSweep = "sweep-sigma-c";

// 0 followed by log-spaced times up to t_final.
std::vector<double> default_snapshot_times(double t_final) {
  std::vector<double> times{0.0};
  const double lo = std::log(0.05);
  const double hi = std::log(t_final);
  constexpr int kCount = 8;
  for (int k = 0; k < kCount; ++k) {
    const double t = std::exp(lo + (hi - lo) * k / (kCount - 1));
    times.push_back(std::round(t * 1000.0) / 1000.0);
  }
  times.back() = t_final;
  return times;
}

SimulationConfig base(std::string name, double sigma, double t_final,
                      std::vector<GaussianComponent> initial) {
  SimulationConfig cfg;
  cfg.name = std::move(name);
  cfg.sigma = sigma;
  cfg.t_final = t_final;
  cfg.initial = std::move(initial);
  cfg.output.directory = "out/" + cfg.name;
  cfg.output.snapshot_times = default_snapshot_times(t_final);
  return cfg;
}

std::vector<double> boundary_times(const RegimeSegmentation& seg) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < seg.segments.size(); ++k) out.push_back(seg.segments[k].t_end);
  return out;
}

nlohmann::json kernel_summary(const InteractionKernel& kernel) {
  return std::string(describe(kernel));
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "ex1", "ex2",
                                              "fig5", "fig6", "hk",  std::string(kSweep)};
  return names;
}

SimulationConfig preset_config(std::string_view name) {
  SimulationConfig cfg;
  if (name == "fig1") {
    cfg = base("fig1", 1.1, 20.0, {{1.0, 0.0, 0.5}});
  } else if (name == "fig2") {
    cfg = base("fig2", 0.5, 20.0, {{1.0, 0.0, 0.5}});
  } else if (name == "ex1") {
    cfg = base("ex1", 0.838, 40.0, {{1.0, 0.0, 0.5}});
    // The opening Diffusion band lasts ~0.045, so min_duration must stay
    // below it; the A->D crossover sits on a plateau with |rates| < 5e-4.
    cfg.classifier = {5e-4, 0.03};
  } else if (name == "ex2") {
    cfg = base("ex2", 0.65, 20.0, {{0.5, 0.5, 0.2}, {0.5, -0.5, 0.2}});
    // absorbs the 0.08-long Cooperative crossover at the A->D switch
    cfg.classifier.min_duration = 0.1;
  } else if (name == "fig5") {
    cfg = base("fig5", 0.838, 20.0, {{1.0, 0.0, 0.4}});
  } else if (name == "fig6") {
    cfg = base("fig6", 0.838, 40.0, {{1.0, 0.0, 0.6}});
  } else if (name == "hk") {
    cfg = base("hk", 0.485, 200.0, {{1.0, 0.0, 0.5}});
    cfg.kernel = HegselmannKrauseKernel{0.5};
  } else if (name == kSweep) {
    throw Error(ErrorKind::Usage, "sweep-sigma-c is a sweep; use `mvlab sweep-sigma-c`");
  } else {
    throw Error(ErrorKind::Usage, "unknown preset '" + std::string(name) + "'");
  }
  validate(cfg);
  return cfg;
}

RunResult run_simulation(const SimulationConfig& config) {
  validate(config);
  const auto grid = make_grid(config.domain.length, static_cast<std::int64_t>(config.domain.n_cells));
  const auto table = periodize_on_grid(config.kernel, grid);
  const auto initial = mixture(config.initial, grid);

  EvolveOptions options;
  options.t_final = config.t_final;
  options.record_stride = config.record_stride;
  options.snapshot_times = config.output.snapshot_times;

  auto trajectory = evolve(initial, table, config.sigma, config.solver, options);
  auto segmentation = classify_regimes(trajectory.ledger, config.classifier);
  const auto state = classify_final_state(trajectory.final_field, config.flatness_tol);
  RunResult result{config, std::move(trajectory), std::move(segmentation), state, {}};

  const auto& traj = result.trajectory;
  const auto& field = traj.final_field;
  const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());

  nlohmann::json labels = nlohmann::json::array();
  for (Regime r : result.segmentation.active_labels()) labels.push_back(std::string(to_string(r)));

  auto& s = result.summary;
  s["name"] = config.name;
  s["kernel"] = kernel_summary(config.kernel);
  s["sigma"] = config.sigma;
  s["final_state"] = std::string(to_string(result.final_state));
  s["final_peak"] = peak_height(field);
  s["final_contrast"] = *hi - *lo;
  s["stop_reason"] = std::string(to_string(traj.stop_reason));
  s["t_stop"] = traj.t_stop;
  s["reported_steps"] = traj.reported_steps;
  s["substeps"] = traj.substeps;
  s["max_mass_drift"] = traj.max_mass_drift;
  s["max_negativity"] = traj.max_negativity;
  s["max_energy_increase"] = traj.ledger.max_energy_increase();
  s["labels"] = labels;
  s["boundary_times"] = boundary_times(result.segmentation);
  s["sigma_sharp"] = sigma_sharp(table, config.domain.length);
  s["config"] = config_to_json(config);
  return result;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir) {
  write_file_atomic(dir / "ledger.csv", ledger_to_csv(result.trajectory.ledger));
  write_file_atomic(dir / "segmentation.json",
                    segmentation_to_json(result.segmentation).dump(2) + "\n");
  write_file_atomic(dir / "snapshots.csv", snapshots_to_csv(result.trajectory.snapshots));
  write_file_atomic(dir / "summary.json", result.summary.dump(2) + "\n");
}

SigmaCOptions default_sweep_options() { return SigmaCOptions{}; }

SweepResult run_sigma_c_sweep(const SigmaCOptions& options) {
  const DomainConfig domain;
  const auto grid = make_grid(domain.length, static_cast<std::int64_t>(domain.n_cells));
  const InteractionKernel kernel = reference_morse(domain.length);

  SweepResult result;
  result.bracket = estimate_sigma_c(kernel, grid, options);
  result.sigma_sharp = sigma_sharp(periodize_on_grid(kernel, grid), domain.length);

  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : result.bracket.verdicts) {
    verdicts.push_back({{"sigma", v.sigma},
                        {"state", std::string(to_string(v.state))},
                        {"t_stop", v.t_stop},
                        {"contrast", v.contrast}});
  }
  auto& s = result.summary;
  s["name"] = std::string(kSweep);
  s["kernel"] = kernel_summary(kernel);
  s["sigma_sharp"] = result.sigma_sharp;
  s["sigma_c_bracket"] = {result.bracket.sigma_lo, result.bracket.sigma_hi};
  s["sigma_c"] = 0.5 * (result.bracket.sigma_lo + result.bracket.sigma_hi);
  s["iterations"] = result.bracket.iterations;
  s["verdicts"] = verdicts;
  s["probe_std"] = options.probe_std;
  s["t_max"] = options.t_max;
  s["flatness_tol"] = options.flatness_tol;
  return result;
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::string csv = "sigma,state,t_stop,contrast\n";
  for (const auto& v : result.bracket.verdicts) {
    csv += format_double(v.sigma) + "," + std::string(to_string(v.state)) + "," +
           format_double(v.t_stop) + "," + format_double(v.contrast) + "\n";
  }
  write_file_atomic(dir / "verdicts.csv", csv);
  write_file_atomic(dir / "summary.json", result.summary.dump(2) + "\n");
}

ParticleResult run_particles(const SimulationConfig& config, std::uint64_t seed) {
  validate(config);
  const auto grid = make_grid(config.domain.length, static_cast<std::int64_t>(config.domain.n_cells));
  const auto initial = mixture(config.initial, grid);
  auto ensemble = sample_from_density(initial, config.particles.count, seed);

  ParticleResult result{config,
                        evolve_particles(std::move(ensemble), config.kernel, config.sigma,
                                         config.solver.dt, config.t_final, grid,
                                         config.particles.record_stride),
                        {}};
  const auto& last = result.run.series.back();
  auto& s = result.summary;
  s["name"] = config.name;
  s["kernel"] = kernel_summary(config.kernel);
  s["sigma"] = config.sigma;
  s["seed"] = seed;
  s["count"] = config.particles.count;
  s["t_final"] = last.t;
  s["final_peak"] = last.peak;
  s["final_second_moment"] = last.second_moment;
  s["steps"] = result.run.final_ensemble.steps;
  return result;
}

void write_particle_outputs(const ParticleResult& result, const std::filesystem::path& dir) {
  std::string csv = "t,peak,m2\n";
  for (const auto& o : result.run.series) {
    csv += format_double(o.t) + "," + format_double(o.peak) + "," + format_double(o.second_moment) +
           "\n";
  }
  write_file_atomic(dir / "particles.csv", csv);
  write_file_atomic(dir / "summary.json", result.summary.dump(2) + "\n");
}

}  // namespace mvlab
