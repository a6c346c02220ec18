#pragma once

// Workload-driven aging stimulus: equivalent long-period BTI waveforms built
// by iterative extrapolation, and the HCI transition factor.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "avsim/aging_models.hpp"

namespace avsim {

struct WorkloadStats {
  double duty_factor = 0.5;
  double toggle_rate = 0.0075;      // transitions per cycle
  double t_clk = 1.6e-9;            // s
  double transition_time = 20e-12;  // s

  void validate() const;
  /// One stress/recovery period of the base waveform (t_clk / toggle_rate).
  double base_period() const { return t_clk / toggle_rate; }
};

/// Averages per-cell `cell,duty_factor,toggle_rate` rows into one set of
/// statistics; clock and transition time are taken from `base`.
WorkloadStats average_cell_activity(std::span<const double> duty, std::span<const double> toggle,
                                    const WorkloadStats& base);

struct EquivalentWaveform {
  double period = 0.0;             // s
  double v_stress = 0.0;           // V
  double v_recovery = 0.0;         // V
  double stress_fraction = 0.0;    // duty factor
  int level = 0;
  std::uint64_t cycles_represented = 1;

  double stress_time() const { return period * stress_fraction; }
  double recovery_time() const { return period * (1.0 - stress_fraction); }
};

EquivalentWaveform base_waveform(const WorkloadStats& stats, double v_dd);

/// One full period (stress then recovery) of `w` applied to a species.
SpeciesState apply_waveform(const SpeciesLaws& laws, double temperature_K,
                            const SpeciesState& state, const EquivalentWaveform& w);

/// Builds the waveform whose single period reproduces N periods of `w` for
/// one trap species: the stress voltage matches the stress-only aggregate and
/// the recovery voltage matches the shift left after the N cycles. Both are
/// bisected on [0, 2·v_dd]. N == 1 returns `w`.
EquivalentWaveform lift_waveform(const EquivalentWaveform& w, int n, const SpeciesLaws& laws,
                                 double temperature_K, double v_dd);

struct ExtrapolationOptions {
  int branch_factor = 10;
  double checkpoints_per_decade = 50.0;
  double first_checkpoint = 1.0;  // s
};

/// ΔV_th(t) of PMOS BTI under constant V_DD, sampled at the end of whole base
/// periods (level boundaries plus log-spaced checkpoints). The last sample is
/// at or beyond the horizon.
struct BtiTrajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> species;  // [species][sample]
  std::vector<double> total;
  std::vector<std::vector<EquivalentWaveform>> ladders;  // [species][level]
};

BtiTrajectory extrapolate_bti(const WorkloadStats& stats, double v_dd, const AgingModel& model,
                              double horizon, const ExtrapolationOptions& opts = {});

/// Shift after `cycles` base periods from a fresh device, using a prebuilt
/// ladder (largest level first, mixed-radix decomposition of `cycles`).
double evaluate_ladder(const SpeciesLaws& laws, double temperature_K,
                       const std::vector<EquivalentWaveform>& ladder, int branch_factor,
                       std::uint64_t cycles);

/// Continuous view of one species' extrapolated trajectory, used as a
/// monotone law for equivalent-time continuation across voltage epochs.
class BtiResponse {
 public:
  BtiResponse() = default;
  BtiResponse(std::vector<double> t, std::vector<double> dvth);

  double operator()(double t) const;
  /// Smallest t with response(t) == dvth (ContinuationError if unreachable).
  double equivalent_time(double dvth) const;
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& values() const { return v_; }

 private:
  std::vector<double> t_;
  std::vector<double> v_;
};

std::vector<BtiResponse> bti_responses(const BtiTrajectory& traj);

// ---------------------------------------------------------------------------
// HCI.

/// Sampled gate-voltage waveform over one transition.
struct TransitionWaveform {
  std::vector<double> t;  // s, starting at 0
  std::vector<double> v;  // V
};

TransitionWaveform linear_ramp(double transition_time, double v_dd, int intervals);

/// Effective HCI factor γ: the fraction of the transition time that, held at
/// V_DD, produces the degradation accumulated over the sampled transition.
/// Each interval is stressed at its midpoint voltage with equivalent-time
/// continuation, then the total is inverted at V_DD.
double gamma_factor(const TransitionWaveform& wave, double v_dd, const StressLaw& hci,
                    double temperature_K);

/// Equivalent HCI stress time accumulated over `total_time` of operation.
double hci_stress_time(double gamma, const WorkloadStats& stats, double total_time);

/// Advances the HCI component of `state` by total_time of operation at v_dd.
DeviceAgingState accumulate_hci(double gamma, const WorkloadStats& stats, double total_time,
                                double v_dd, const StressLaw& hci, double temperature_K,
                                const DeviceAgingState& state);

/// Reads a `t_seconds,v_volts` CSV.
TransitionWaveform load_transition_csv(const std::string& path);

}  // namespace avsim
