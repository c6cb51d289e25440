#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvlab/energy.hpp"
#include "mvlab/grid.hpp"

namespace mvlab {

double peak_height(const DensityField& field);

/// sum x_i^2 rho_i dx about the domain centre.
double second_moment(const DensityField& field);

/// Time-ordered energy samples with strictly increasing t.
class EnergyLedger {
 public:
  EnergyLedger() = default;
  explicit EnergyLedger(std::vector<EnergySample> samples);

  /// Throws InvalidConfiguration when t does not increase.
  void append(const EnergySample& sample);

  const std::vector<EnergySample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const EnergySample& operator[](std::size_t i) const { return samples_[i]; }
  const EnergySample& front() const { return samples_.front(); }
  const EnergySample& back() const { return samples_.back(); }

  /// Largest F(t_{k+1}) - F(t_k) over consecutive samples.
  double max_energy_increase() const noexcept;

  friend bool operator==(const EnergyLedger&, const EnergyLedger&) = default;

 private:
  std::vector<EnergySample> samples_;
};

enum class Regime { Aggregation, Diffusion, Cooperative, Quiescent };

std::string_view to_string(Regime regime);
std::optional<Regime> parse_regime(std::string_view text);

struct RegimeSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  Regime label = Regime::Quiescent;

  double duration() const noexcept { return t_end - t_start; }
  friend bool operator==(const RegimeSegment&, const RegimeSegment&) = default;
};

struct ClassifierSettings {
  /// Absolute rate threshold; when unset, 1e-4 times the mean dissipation
  /// rate (F(t_first) - F(t_last)) / (t_last - t_first).
  std::optional<double> rate_deadband;
  double min_duration = 0.05;

  friend bool operator==(const ClassifierSettings&, const ClassifierSettings&) = default;
};

struct RegimeSegmentation {
  std::vector<RegimeSegment> segments;
  /// Dead band and minimum duration actually used.
  double rate_deadband = 0.0;
  double min_duration = 0.0;
  /// Times where both energy parts increased beyond the dead band.
  std::vector<double> warnings;

  /// Labels in order, with Quiescent segments dropped and neighbours that
  /// become adjacent merged.
  std::vector<Regime> active_labels() const;

  friend bool operator==(const RegimeSegmentation&, const RegimeSegmentation&) = default;
};

/// Centered finite-difference rate of a series (one-sided at endpoints).
std::vector<double> finite_difference_rates(const std::vector<double>& t,
                                            const std::vector<double>& y);

/// Per-sample label from the signs of dF_ent/dt and dF_int/dt.
Regime label_rates(double entropic_rate, double interaction_rate, double deadband);

RegimeSegmentation classify_regimes(const EnergyLedger& ledger,
                                    const ClassifierSettings& settings = {});

}  // namespace mvlab
