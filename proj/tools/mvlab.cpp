// mvlab command-line front end.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mvlab/config.hpp"
#include "mvlab/error.hpp"
#include "mvlab/io.hpp"
#include "mvlab/scenarios.hpp"

namespace {

int report(std::string_view kind, const std::string& message, const std::string& path = {}) {
  nlohmann::json record{{"error", kind}, {"message", message}};
  if (!path.empty()) record["path"] = path;
  std::cerr << record.dump() << '\n';
  return kind == mvlab::to_string(mvlab::ErrorKind::Usage) ? 2 : 1;
}

void print_summary(const nlohmann::json& summary, const std::filesystem::path& dir) {
  std::cout << "wrote " << dir.string() << '\n';
  for (const char* key : {"final_state", "labels", "boundary_times", "sigma_sharp", "sigma_c_bracket",
                          "final_second_moment"}) {
    if (summary.contains(key)) std::cout << "  " << key << ": " << summary[key].dump() << '\n';
  }
}

mvlab::SimulationConfig load(const std::string& path) {
  return mvlab::parse_config(mvlab::read_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mvlab: McKean-Vlasov aggregation-diffusion lab on the torus"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Evolve the PDE from a config document");
  run->add_option("--config", config_path, "Config file (JSON or key = value lines)")
      ->required();
  run->add_option("--out", out_dir, "Output directory (default: output.directory)");

  auto* scenario = app.add_subcommand("scenario", "Run a named preset");
  scenario->add_option("name", preset, "Preset name")->required();
  scenario->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep-sigma-c", "Bisect for the phase-transition noise level");
  sweep->add_option("--out", out_dir, "Output directory")->required();

  auto* particles = app.add_subcommand("particles", "Euler-Maruyama particle run");
  particles->add_option("--config", config_path, "Config file")->required();
  particles->add_option("--seed", seed, "Noise seed");
  particles->add_option("--out", out_dir, "Output directory (default: output.directory)");

  std::string ledger_path;
  double deadband = -1.0;
  double min_duration = mvlab::ClassifierSettings{}.min_duration;
  auto* classify = app.add_subcommand("classify", "Re-segment an existing ledger.csv");
  classify->add_option("--ledger", ledger_path, "ledger.csv to read")->required();
  classify->add_option("--deadband", deadband, "Absolute rate dead band (default: relative)");
  classify->add_option("--min-duration", min_duration, "Shortest segment kept");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(mvlab::to_string(mvlab::ErrorKind::Usage), e.what());
  }

  try {
    if (*run) {
      const auto cfg = load(config_path);
      const auto result = mvlab::run_simulation(cfg);
      const std::filesystem::path dir = out_dir.empty() ? cfg.output.directory : out_dir;
      mvlab::write_run_outputs(result, dir);
      print_summary(result.summary, dir);
    } else if (*scenario) {
      if (preset == "sweep-sigma-c") {
        const auto result = mvlab::run_sigma_c_sweep();
        mvlab::write_sweep_outputs(result, out_dir);
        print_summary(result.summary, out_dir);
      } else {
        const auto result = mvlab::run_simulation(mvlab::preset_config(preset));
        mvlab::write_run_outputs(result, out_dir);
        print_summary(result.summary, out_dir);
      }
    } else if (*sweep) {
      const auto result = mvlab::run_sigma_c_sweep();
      mvlab::write_sweep_outputs(result, out_dir);
      print_summary(result.summary, out_dir);
    } else if (*classify) {
      const auto ledger = mvlab::ledger_from_csv(mvlab::read_file(ledger_path));
      mvlab::ClassifierSettings settings;
      if (deadband >= 0.0) settings.rate_deadband = deadband;
      settings.min_duration = min_duration;
      std::cout << mvlab::segmentation_to_json(mvlab::classify_regimes(ledger, settings)).dump(2)
                << '\n';
    } else if (*particles) {
      auto cfg = load(config_path);
      if (particles->count("--seed") == 0) seed = cfg.seed;
      const auto result = mvlab::run_particles(cfg, seed);
      const std::filesystem::path dir = out_dir.empty() ? cfg.output.directory : out_dir;
      mvlab::write_particle_outputs(result, dir);
      print_summary(result.summary, dir);
    }
  } catch (const mvlab::ValidationError& e) {
    return report(mvlab::to_string(e.kind()), e.what(), e.path());
  } catch (const mvlab::Error& e) {
    return report(mvlab::to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report("internal", e.what());
  }
  return 0;
}
