#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "mvlab/config.hpp"
#include "mvlab/error.hpp"
#include "mvlab/io.hpp"
#include "mvlab/scenarios.hpp"

using namespace mvlab;
namespace fs = std::filesystem;

namespace {

std::string validation_path(std::string_view doc) {
  try {
    parse_config(doc);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<none>";
}

ErrorKind error_kind(std::string_view doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("mvlab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal JSON document gets the defaults") {
  const auto cfg = parse_config(R"({
    "kernel": {"type": "morse", "C_a": 4, "C_r": 1, "l_a": 0.125, "l_r": 0.05},
    "sigma": 0.838,
    "initial": [[1, 0, 0.5]],
    "t_final": 20
  })");
  CHECK(cfg.sigma == 0.838);
  CHECK(cfg.t_final == 20.0);
  CHECK(cfg.solver.dt == 1e-3);
  CHECK(cfg.domain.n_cells == 512);
  CHECK(cfg.domain.length == 5.0);
  CHECK(std::get<MorseKernel>(cfg.kernel) == reference_morse());
  REQUIRE(cfg.initial.size() == 1);
  CHECK(cfg.initial[0] == GaussianComponent{1.0, 0.0, 0.5});

  const auto ex1 = preset_config("ex1");
  CHECK(ex1.sigma == cfg.sigma);
  CHECK(ex1.initial == cfg.initial);
  CHECK(ex1.kernel == cfg.kernel);
}

TEST_CASE("flat key = value documents") {
  const auto cfg = parse_config(R"(
# example 2
sigma = 0.65
t_final = 20
initial = [{"weight": 0.5, "mean": 0.5, "std": 0.2}, {"weight": 0.5, "mean": -0.5, "std": 0.2}]
kernel.type = morse
solver.scheme = centered_diffusion_upwind_advection
output.directory = runs/ex2
classifier.rate_deadband = 1e-4
)");
  CHECK(cfg.sigma == 0.65);
  REQUIRE(cfg.initial.size() == 2);
  CHECK(cfg.initial[1].mean == -0.5);
  CHECK(cfg.solver.scheme == Scheme::CenteredDiffusionUpwindAdvection);
  CHECK(cfg.output.directory == "runs/ex2");
  CHECK(cfg.classifier.rate_deadband == 1e-4);

  const auto ex2 = preset_config("ex2");
  CHECK(ex2.initial == cfg.initial);
  CHECK(ex2.sigma == cfg.sigma);
}

TEST_CASE("Hegselmann-Krause kernel and solver block") {
  const auto cfg = parse_config(R"({"kernel": {"type": "hegselmann_krause", "R_0": 0.5},
    "sigma": 0.485, "initial": {"components": [[1, 0, 0.5]]},
    "solver": {"dt": 0.002, "t_final": 3, "record_stride": 5}, "domain": {"n_cells": 256}})");
  CHECK(std::get<HegselmannKrauseKernel>(cfg.kernel).radius == 0.5);
  CHECK(cfg.t_final == 3.0);
  CHECK(cfg.solver.dt == 0.002);
  CHECK(cfg.record_stride == 5);
  CHECK(cfg.domain.n_cells == 256);
}

TEST_CASE("validation errors carry field paths") {
  CHECK(validation_path(R"({"initial": [[1, 0, 0.5]], "t_final": 20})") == "sigma");
  CHECK(validation_path(R"({"sigma": 1, "initial": [[1, 0, 0.5]]})") == "t_final");
  CHECK(validation_path(R"({"sigma": 1, "t_final": 2})") == "initial");
  CHECK(validation_path(R"({"sigma": -1, "t_final": 2, "initial": [[1, 0, 0.5]]})") == "sigma");
  CHECK(validation_path(R"({"sigma": 1, "t_final": 2, "initial": [[0.6, 0, 0.5], [0.3, 1, 0.5]]})") ==
        "initial");
  CHECK(validation_path(
            R"({"sigma": 1, "t_final": 2, "initial": [[1, 0, 0.5]], "solver": {"dt": 0}})") ==
        "solver.dt");
  CHECK(validation_path(R"({"sigma": 1, "t_final": 2, "initial": [[1, 0, 0.5]],
      "kernel": {"type": "hegselmann_krause", "R_0": 3}})") == "kernel.R_0");
  CHECK(validation_path(R"({"sigma": 1, "t_final": 2, "initial": [[1, 0, 0.5]],
      "domain": {"n_cells": 1}})") == "domain.n_cells");

  try {
    parse_config(R"({"initial": [[1, 0, 0.5]], "t_final": 20})");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "sigma: required");
  }
}

TEST_CASE("schema violations are parse errors") {
  CHECK(error_kind(R"({"sigma": 1, "t_final": 2, "initial": [[1, 0, 0.5]], "sigmaa": 1})") ==
        ErrorKind::Parse);
  CHECK(error_kind(R"({"sigma": "big", "t_final": 2, "initial": [[1, 0, 0.5]]})") ==
        ErrorKind::Parse);
  CHECK(error_kind(R"({"sigma": 1, "t_final": 2, "initial": [[1, 0]]})") == ErrorKind::Parse);
  CHECK(error_kind(R"({"sigma": 1, "t_final": 2, "initial": [[1, 0, 0.5]],
      "kernel": {"type": "lennard_jones"}})") == ErrorKind::Parse);
  CHECK(error_kind(R"({"sigma": 1, "t_final": 2, "initial": [[1, 0, 0.5]],
      "solver": {"scheme": "rk4"}})") == ErrorKind::Parse);
  CHECK(error_kind(R"({"sigma": 1, "t_final": 2, "solver": {"t_final": 3}, "initial": [[1, 0, 0.5]]})") ==
        ErrorKind::Parse);
  CHECK(error_kind(R"({"sigma": 1,)") == ErrorKind::Parse);
  CHECK(error_kind("sigma 1\n") == ErrorKind::Parse);
  CHECK(error_kind("sigma = 1\nsigma = 2\n") == ErrorKind::Parse);

  try {
    parse_config(R"({"sigma": 1, "t_final": 2, "initial": [[1, 0, 0.5]], "solver": {"dtt": 1}})");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("solver.dtt") != std::string::npos);
  }
}

TEST_CASE("config JSON round trip") {
  for (const auto& name : preset_names()) {
    if (name == "sweep-sigma-c") continue;
    const auto cfg = preset_config(name);
    CHECK(config_from_json(config_to_json(cfg)) == cfg);
  }
}

TEST_CASE("unknown presets") {
  CHECK_THROWS_AS(preset_config("fig9"), Error);
  try {
    preset_config("fig9");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
  }
}

TEST_CASE("CSV quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  const std::vector<std::string> fields{"x", "a,b", "q\"q", ""};
  std::string line;
  for (const auto& f : fields) line += csv_field(f) + ",";
  line.pop_back();
  CHECK(parse_csv_record(line) == fields);
  CHECK_THROWS_AS(parse_csv_record("\"open"), Error);
}

TEST_CASE("doubles survive text") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, i % 40 - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("ledger CSV round trip") {
  EnergyLedger l;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 50; ++k) {
    l.append({0.01 * k, nd(rng), nd(rng), nd(rng), std::abs(nd(rng)), nd(rng) * 1e-9, 1e300});
  }
  const auto text = ledger_to_csv(l);
  CHECK(text.rfind("t,F,F_ent,F_int,dissipation,peak,m2\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(ledger_from_csv(text) == l);
  CHECK_THROWS_AS(ledger_from_csv("t,F\n0,1\n"), Error);
  CHECK_THROWS_AS(ledger_from_csv("t,F,F_ent,F_int,dissipation,peak,m2\n0,1,2\n"), Error);
  CHECK_THROWS_AS(ledger_from_csv("t,F,F_ent,F_int,dissipation,peak,m2\n0,1,2,3,4,5,x\n"), Error);
}

TEST_CASE("segmentation JSON round trip") {
  RegimeSegmentation s;
  s.segments = {{0.0, 0.045, Regime::Diffusion},
                {0.045, 0.405, Regime::Cooperative},
                {0.405, 3.0250000000000004, Regime::Aggregation},
                {3.0250000000000004, 40.0, Regime::Quiescent}};
  s.rate_deadband = 5e-4;
  s.min_duration = 0.03;
  s.warnings = {1.2345678901234567};
  const auto text = segmentation_to_json(s).dump();
  CHECK(segmentation_from_json(nlohmann::json::parse(text)) == s);
  CHECK_THROWS_AS(segmentation_from_json(nlohmann::json::parse(R"({"segments": []})")), Error);
  CHECK_THROWS_AS(segmentation_from_json(nlohmann::json::parse(
                      R"({"segments": [{"t_start": 0, "t_end": 1, "label": "Chaos"}],
                          "classifier": {"rate_deadband": 0, "min_duration": 0}, "warnings": []})")),
                  Error);
}

TEST_CASE("atomic writes") {
  const auto dir = scratch("atomic");
  const auto file = dir / "nested" / "a.txt";
  write_file_atomic(file, "first");
  write_file_atomic(file, "second,\nline");
  CHECK(read_file(file) == "second,\nline");
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
  CHECK_THROWS_AS(read_file(dir / "missing"), Error);
  fs::remove_all(dir);
}

TEST_CASE("small run writes parseable, deterministic outputs") {
  auto cfg = parse_config(R"({"sigma": 0.838, "t_final": 0.5, "initial": [[1, 0, 0.5]],
      "domain": {"n_cells": 64}, "output": {"snapshot_times": [0, 0.25, 0.5]}})");
  const auto a = run_simulation(cfg);
  const auto b = run_simulation(cfg);
  const auto da = scratch("run_a"), db = scratch("run_b");
  write_run_outputs(a, da);
  write_run_outputs(b, db);
  for (const char* name : {"ledger.csv", "segmentation.json", "snapshots.csv", "summary.json"}) {
    CHECK(read_file(da / name) == read_file(db / name));
  }
  CHECK(ledger_from_csv(read_file(da / "ledger.csv")) == a.trajectory.ledger);
  CHECK(segmentation_from_json(nlohmann::json::parse(read_file(da / "segmentation.json"))) ==
        a.segmentation);
  const auto summary = nlohmann::json::parse(read_file(da / "summary.json"));
  CHECK(summary.at("final_state") == "Clustered");
  CHECK(summary.at("config") == config_to_json(cfg));

  const auto snaps = read_file(da / "snapshots.csv");
  CHECK(std::count(snaps.begin(), snaps.end(), '\n') == 1 + 3 * 64);
  fs::remove_all(da);
  fs::remove_all(db);
}
