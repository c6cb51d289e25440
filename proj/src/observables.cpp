#include "mvlab/observables.hpp"

#include <algorithm>
#include <cmath>

#include "mvlab/error.hpp"

namespace mvlab {

double peak_height(const DensityField& field) {
  const auto v = field.values();
  return *std::max_element(v.begin(), v.end());
}

double second_moment(const DensityField& field) {
  const auto& grid = field.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double x = grid.center(i);
    acc += x * x * field[i];
  }
  return acc * grid.dx();
}

EnergyLedger::EnergyLedger(std::vector<EnergySample> samples) {
  samples_.reserve(samples.size());
  for (const auto& s : samples) append(s);
}

void EnergyLedger::append(const EnergySample& sample) {
  if (!samples_.empty() && !(sample.t > samples_.back().t)) {
    throw Error(ErrorKind::InvalidConfiguration, "ledger times must be strictly increasing");
  }
  samples_.push_back(sample);
}

double EnergyLedger::max_energy_increase() const noexcept {
  double worst = -INFINITY;
  for (std::size_t k = 1; k < samples_.size(); ++k) {
    worst = std::max(worst, samples_[k].free_energy - samples_[k - 1].free_energy);
  }
  return worst;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Aggregation: return "Aggregation";
    case Regime::Diffusion: return "Diffusion";
    case Regime::Cooperative: return "Cooperative";
    case Regime::Quiescent: return "Quiescent";
  }
  return "Quiescent";
}

std::optional<Regime> parse_regime(std::string_view text) {
  for (Regime r : {Regime::Aggregation, Regime::Diffusion, Regime::Cooperative,
                   Regime::Quiescent}) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

std::vector<Regime> RegimeSegmentation::active_labels() const {
  std::vector<Regime> out;
  for (const auto& s : segments) {
    if (s.label == Regime::Quiescent) continue;
    if (out.empty() || out.back() != s.label) out.push_back(s.label);
  }
  return out;
}

std::vector<double> finite_difference_rates(const std::vector<double>& t,
                                            const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> rate(n, 0.0);
  if (n < 2) return rate;
  rate[0] = (y[1] - y[0]) / (t[1] - t[0]);
  rate[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    rate[k] = (y[k + 1] - y[k - 1]) / (t[k + 1] - t[k - 1]);
  }
  return rate;
}

Regime label_rates(double entropic_rate, double interaction_rate, double deadband) {
  if (std::abs(entropic_rate) <= deadband || std::abs(interaction_rate) <= deadband) {
    return Regime::Quiescent;
  }
  if (entropic_rate > 0.0 && interaction_rate < 0.0) return Regime::Aggregation;
  if (entropic_rate < 0.0 && interaction_rate > 0.0) return Regime::Diffusion;
  if (entropic_rate < 0.0 && interaction_rate < 0.0) return Regime::Cooperative;
  return Regime::Quiescent;  // both increasing
}

namespace {

void coalesce(std::vector<RegimeSegment>& segs) {
  std::vector<RegimeSegment> out;
  out.reserve(segs.size());
  for (const auto& s : segs) {
    if (!out.empty() && out.back().label == s.label) {
      out.back().t_end = s.t_end;
    } else {
      out.push_back(s);
    }
  }
  segs = std::move(out);
}

// Repeatedly folds the shortest segment below min_duration into its longer
// neighbour; equal neighbours resolve to the earlier one.
void merge_short(std::vector<RegimeSegment>& segs, double min_duration) {
  while (segs.size() > 1) {
    std::size_t victim = segs.size();
    for (std::size_t k = 0; k < segs.size(); ++k) {
      if (segs[k].duration() >= min_duration) continue;
      if (victim == segs.size() || segs[k].duration() < segs[victim].duration()) victim = k;
    }
    if (victim == segs.size()) break;

    bool backward;
    if (victim == 0) {
      backward = false;
    } else if (victim + 1 == segs.size()) {
      backward = true;
    } else {
      backward = segs[victim - 1].duration() >= segs[victim + 1].duration();
    }
    if (backward) {
      segs[victim - 1].t_end = segs[victim].t_end;
    } else {
      segs[victim + 1].t_start = segs[victim].t_start;
    }
    segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(victim));
    coalesce(segs);
  }
}

}  // namespace

RegimeSegmentation classify_regimes(const EnergyLedger& ledger,
                                    const ClassifierSettings& settings) {
  const std::size_t n = ledger.size();
  if (n < 3) {
    throw Error(ErrorKind::InsufficientData, "regime classification needs at least 3 samples");
  }
  if (settings.rate_deadband && !(*settings.rate_deadband >= 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "rate dead band must be nonnegative");
  }
  if (!(settings.min_duration >= 0.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "minimum duration must be nonnegative");
  }

  std::vector<double> t(n), ent(n), inter(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = ledger[k].t;
    ent[k] = ledger[k].entropic;
    inter[k] = ledger[k].interaction;
  }
  const double span = t.back() - t.front();
  const double deadband =
      settings.rate_deadband.value_or(
          1e-4 * std::abs(ledger.front().free_energy - ledger.back().free_energy) / span);

  const auto r_ent = finite_difference_rates(t, ent);
  const auto r_int = finite_difference_rates(t, inter);

  RegimeSegmentation out;
  out.rate_deadband = deadband;
  out.min_duration = settings.min_duration;

  std::vector<RegimeSegment> segs;
  for (std::size_t k = 0; k < n; ++k) {
    const Regime label = label_rates(r_ent[k], r_int[k], deadband);
    if (r_ent[k] > deadband && r_int[k] > deadband) out.warnings.push_back(t[k]);
    // Boundaries sit halfway between samples so segments tile [t_0, t_last].
    const double lo = k == 0 ? t[0] : 0.5 * (t[k - 1] + t[k]);
    const double hi = k + 1 == n ? t[n - 1] : 0.5 * (t[k] + t[k + 1]);
    segs.push_back({lo, hi, label});
  }
  coalesce(segs);
  merge_short(segs, settings.min_duration);
  out.segments = std::move(segs);
  return out;
}

}  // namespace mvlab
