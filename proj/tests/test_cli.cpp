#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli(const std::string& args, const fs::path& work) {
  const auto err = work / "stderr.txt";
  const std::string cmd =
      std::string(MVLAB_CLI) + " " + args + " > /dev/null 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

fs::path workdir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("mvlab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("unknown preset is a usage error") {
  const auto w = workdir("usage");
  const auto r = cli("scenario fig9 --out " + (w / "o").string(), w);
  CHECK(r.status != 0);
  const auto rec = nlohmann::json::parse(r.err);
  CHECK(rec.at("error") == "usage_error");
  CHECK(rec.at("message").get<std::string>().find("fig9") != std::string::npos);
}

TEST_CASE("missing sigma is reported with its path") {
  const auto w = workdir("validation");
  write(w / "cfg.json", R"({"initial": [[1, 0, 0.5]], "t_final": 1})");
  const auto r = cli("run --config " + (w / "cfg.json").string(), w);
  CHECK(r.status != 0);
  const auto rec = nlohmann::json::parse(r.err);
  CHECK(rec.at("error") == "validation_error");
  CHECK(rec.at("path") == "sigma");
  CHECK(rec.at("message") == "sigma: required");
}

TEST_CASE("bad command lines and unreadable files") {
  const auto w = workdir("bad");
  CHECK(cli("", w).status != 0);
  CHECK(cli("scenario", w).status != 0);
  const auto r = cli("run --config " + (w / "nope.json").string(), w);
  CHECK(r.status != 0);
  CHECK(nlohmann::json::parse(r.err).at("error") == "io_error");
}

TEST_CASE("run and particles are byte-reproducible") {
  const auto w = workdir("repro");
  write(w / "cfg.txt",
        "sigma = 1.1\nt_final = 0.2\ninitial = [[1, 0, 0.5]]\ndomain.n_cells = 64\n"
        "particles.count = 200\nparticles.record_stride = 20\n");
  for (const char* dir : {"a", "b"}) {
    CHECK(cli("run --config " + (w / "cfg.txt").string() + " --out " + (w / dir).string(), w)
              .status == 0);
    CHECK(cli("particles --config " + (w / "cfg.txt").string() + " --seed 7 --out " +
                  (w / dir / "p").string(),
              w)
              .status == 0);
  }
  for (const char* f : {"ledger.csv", "segmentation.json", "snapshots.csv", "summary.json",
                        "p/particles.csv", "p/summary.json"}) {
    CHECK(fs::exists(w / "a" / f));
    CHECK(slurp(w / "a" / f) == slurp(w / "b" / f));
  }
  CHECK(cli("particles --config " + (w / "cfg.txt").string() + " --seed 8 --out " +
                (w / "c").string(),
            w)
            .status == 0);
  CHECK(slurp(w / "c" / "particles.csv") != slurp(w / "a" / "p" / "particles.csv"));
  fs::remove_all(w);
}
