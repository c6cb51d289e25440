#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mvlab/error.hpp"
#include "mvlab/stability.hpp"

using namespace mvlab;

namespace {

double morse_hat(const MorseKernel& m, double L, int k) {
  auto lorentz = [&](double C, double l) {
    const double w = 2 * std::numbers::pi * k * l / L;
    return 2 * C * l / (1 + w * w);
  };
  return -lorentz(m.attraction_strength, m.attraction_length) +
         lorentz(m.repulsion_strength, m.repulsion_length);
}

}  // namespace

TEST_CASE("sigma_sharp for the reference Morse kernel") {
  const auto g = make_grid(5.0, 512);
  const auto m = reference_morse();
  const auto t = periodize_on_grid(m, g);

  double best = 0.0;
  int best_k = 0;
  for (int k = 1; k <= 20; ++k) {
    const double growth = -2 * morse_hat(m, 5.0, k) / 5.0;
    if (growth > best) {
      best = growth;
      best_k = k;
    }
  }
  CHECK(best_k == 1);
  CHECK(best == doctest::Approx(0.3505).epsilon(1e-3));

  const double s = sigma_sharp(t, 5.0);
  CHECK(s == doctest::Approx(std::sqrt(best)).epsilon(1e-3));
  CHECK(s >= 0.58);
  CHECK(s <= 0.61);
  CHECK(sigma_sharp_mode(t, 5.0) == 1);
}

TEST_CASE("sigma_sharp edge cases and invariances") {
  const auto g = make_grid(5.0, 256);
  const auto zero = KernelTable::from_samples(g, std::vector<double>(256, 0.0),
                                              std::vector<double>(256, 0.0));
  CHECK(sigma_sharp(zero, 5.0) == 0.0);
  CHECK(sigma_sharp_mode(zero, 5.0) == 0);

  const auto t = periodize_on_grid(reference_morse(), g);
  std::vector<double> lifted(t.values().begin(), t.values().end());
  for (auto& v : lifted) v += 2.5;
  const auto shifted = KernelTable::from_samples(
      g, lifted, std::vector<double>(t.gradients().begin(), t.gradients().end()));
  CHECK(sigma_sharp(shifted, 5.0) == doctest::Approx(sigma_sharp(t, 5.0)).epsilon(1e-12));

  double previous = 0.0;
  for (double ca : {1.0, 2.0, 4.0, 6.0, 10.0}) {
    MorseKernel m = reference_morse();
    m.attraction_strength = ca;
    const double s = sigma_sharp(periodize_on_grid(m, g), 5.0);
    CHECK(s >= previous);
    previous = s;
  }

  CHECK_THROWS_AS(sigma_sharp(t, 5.0, 0), Error);
  CHECK_THROWS_AS(sigma_sharp(t, 5.0, 128), Error);
}

TEST_CASE("final state") {
  const auto g = make_grid(5.0, 512);
  CHECK(classify_final_state(uniform_density(g)) == FinalState::Homogeneous);
  CHECK(classify_final_state(periodized_gaussian(g, 0.0, 0.5)) == FinalState::Clustered);
  auto nearly = uniform_density(g);
  nearly[3] += 5e-4;
  CHECK(classify_final_state(nearly) == FinalState::Homogeneous);
  CHECK(classify_final_state(nearly, 1e-4) == FinalState::Clustered);
}

TEST_CASE("verdict monotonicity") {
  using FS = FinalState;
  CHECK(verdicts_monotone({{0.7, FS::Clustered}, {1.0, FS::Homogeneous}, {0.85, FS::Clustered}}));
  CHECK_FALSE(verdicts_monotone({{0.7, FS::Homogeneous}, {0.9, FS::Clustered}}));
  CHECK(verdicts_monotone({}));
}

TEST_CASE("bisection arithmetic on a coarse grid") {
  const auto g = make_grid(5.0, 128);
  SigmaCOptions opt;
  opt.sigma_tol = 0.02;
  const auto b = estimate_sigma_c(reference_morse(), g, opt);
  CHECK(b.iterations == 4);
  CHECK(b.width() == doctest::Approx(0.3 / 16).epsilon(1e-12));
  CHECK(b.verdicts.size() == 6);
  CHECK(verdicts_monotone(b.verdicts));
  CHECK(b.sigma_lo < b.sigma_hi);
  for (const auto& v : b.verdicts) {
    if (v.sigma <= b.sigma_lo) CHECK(v.state == FinalState::Clustered);
    if (v.sigma >= b.sigma_hi) CHECK(v.state == FinalState::Homogeneous);
  }
}

TEST_CASE("bracket errors") {
  const auto g = make_grid(5.0, 512);
  SigmaCOptions opt;
  opt.bracket = {0.9, 1.1};
  try {
    estimate_sigma_c(reference_morse(), g, opt);
    FAIL("expected InvalidBracket");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidBracket);
  }
  opt.bracket = {1.0, 0.9};
  CHECK_THROWS_AS(estimate_sigma_c(reference_morse(), g, opt), Error);
  opt.bracket = {0.7, 1.0};
  opt.sigma_tol = 0.0;
  CHECK_THROWS_AS(estimate_sigma_c(reference_morse(), g, opt), Error);
}
