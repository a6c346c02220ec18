#pragma once

// Compact BTI/HCI aging laws and history-aware continuation.
//
// Every law here is monotone in stress time, so a device's degradation under
// a piecewise-constant voltage history can be continued across a voltage
// change by mapping the current shift to the equivalent time at the new
// voltage and resuming the law from there.

#include <memory>
#include <string>
#include <vector>

namespace avsim {

inline constexpr double kBoltzmannEv = 8.617333262e-5;  // eV/K
inline constexpr double kSecondsPerYear = 3.1536e7;
inline constexpr double kDefaultHorizon = 10.0 * kSecondsPerYear;

/// One BTI trap population (capture by power law, emission by stretched
/// exponential toward a permanent fraction).
struct TrapSpecies {
  std::string name;
  double A_c = 0.0;     // capture prefactor (V)
  double B_c = 0.0;     // capture voltage acceleration (1/V)
  double E_ac = 0.0;    // capture activation energy (eV)
  double n_c = 0.2;     // capture time exponent
  double A_e = 0.0;     // emission rate prefactor (1/s)
  double B_e = 0.0;     // emission voltage sensitivity (1/V)
  double E_ae = 0.0;    // emission activation energy (eV)
  double beta_e = 0.5;  // emission stretch exponent
  double r_perm = 0.0;  // permanent fraction in [0, 1]

  void validate() const;
};

struct HciParams {
  double A_h = 0.0;   // prefactor (V)
  double B_h = 0.0;   // voltage acceleration (1/V)
  double E_ah = 0.0;  // activation energy (eV)
  double n_h = 0.45;  // time exponent

  void validate() const;
};

/// Technology parameters for both devices. NMOS ages by HCI only; PMOS by
/// NBTI (all trap species) plus HCI.
struct AgingParams {
  std::vector<TrapSpecies> bti_traps;
  HciParams hci_pmos;
  HciParams hci_nmos;
  double temperature_K = 298.15;
  // Optional self-heating offsets added to the ambient temperature.
  double bti_temperature_offset_K = 0.0;
  double hci_temperature_offset_K = 0.0;

  void validate() const;
  double bti_temperature() const { return temperature_K + bti_temperature_offset_K; }
  double hci_temperature() const { return temperature_K + hci_temperature_offset_K; }

  /// Shipped calibration fixture (non-physical; tuned to the reference
  /// lifetime scenarios, see README).
  static AgingParams defaults();
};

// ---------------------------------------------------------------------------
// Closed-form default laws.

/// A_c·exp(B_c·V)·exp(−E_ac/kT)·t^n_c
double bti_trapping(const TrapSpecies& s, double v_g, double temperature_K, double t);

/// Emission rate A_e·exp(−B_e·V)·exp(−E_ae/kT); a higher recovery gate
/// voltage slows emission.
double emission_rate(const TrapSpecies& s, double v_rec, double temperature_K);

/// dvth_0·[r + (1−r)·exp(−(t·rate)^β)]
double bti_detrapping(const TrapSpecies& s, double dvth_0, double v_rec, double temperature_K,
                      double t);

/// A_h·exp(B_h·V)·exp(−E_ah/kT)·t^n_h
double hci_law(const HciParams& p, double v, double temperature_K, double t);

// ---------------------------------------------------------------------------
// Pluggable law interfaces.

/// A stress law ΔV(V, T, t), non-decreasing in t with value 0 at t = 0.
class StressLaw {
 public:
  virtual ~StressLaw() = default;
  virtual double operator()(double v, double temperature_K, double t) const = 0;

  /// Time t such that law(v, T, t) == dvth. The default implementation
  /// bisects on [0, 10·horizon]; closed-form laws override it.
  virtual double time_to_reach(double dvth, double v, double temperature_K,
                               double horizon = kDefaultHorizon) const;
};

/// Recovery law: remaining shift after time t of recovery from `peak`.
class RecoveryLaw {
 public:
  virtual ~RecoveryLaw() = default;
  virtual double operator()(double peak, double v, double temperature_K, double t) const = 0;

  /// Recovery time after which `peak` has relaxed to `current`. Returns +inf
  /// when `current` lies at or below the asymptote.
  virtual double time_to_reach(double peak, double current, double v, double temperature_K,
                               double horizon = kDefaultHorizon) const;
};

/// K·exp(B·V)·exp(−E_a/kT)·t^n, used for BTI capture and for HCI.
class PowerLaw final : public StressLaw {
 public:
  PowerLaw(double prefactor, double accel, double activation_ev, double exponent);
  static PowerLaw capture(const TrapSpecies& s);
  static PowerLaw hci(const HciParams& p);

  double operator()(double v, double temperature_K, double t) const override;
  double time_to_reach(double dvth, double v, double temperature_K,
                       double horizon = kDefaultHorizon) const override;
  double rate_constant(double v, double temperature_K) const;
  double exponent() const { return exponent_; }

 private:
  double prefactor_;
  double accel_;
  double activation_;
  double exponent_;
};

class StretchedExpRecovery final : public RecoveryLaw {
 public:
  explicit StretchedExpRecovery(const TrapSpecies& s) : species_(s) {}
  double operator()(double peak, double v, double temperature_K, double t) const override;
  double time_to_reach(double peak, double current, double v, double temperature_K,
                       double horizon = kDefaultHorizon) const override;
  double permanent_fraction() const { return species_.r_perm; }

 private:
  TrapSpecies species_;
};

/// Equivalent stress time: t_eq with law(v, T, t_eq) == dvth.
/// Throws ContinuationError if dvth is not reachable.
double equivalent_time(const StressLaw& law, double dvth, double v, double temperature_K,
                       double horizon = kDefaultHorizon);

/// Laws for one trap species, defaulting to the closed forms above.
struct SpeciesLaws {
  std::shared_ptr<const StressLaw> capture;
  std::shared_ptr<const RecoveryLaw> emission;
};

/// Evaluation-side view of AgingParams. Substituting a technology-specific
/// model means constructing this with different law objects.
struct AgingModel {
  std::vector<SpeciesLaws> species;
  std::shared_ptr<const StressLaw> hci_pmos;
  std::shared_ptr<const StressLaw> hci_nmos;
  double bti_temperature_K = 298.15;
  double hci_temperature_K = 298.15;

  static AgingModel from_params(const AgingParams& p);
};

// ---------------------------------------------------------------------------
// Device state.

enum class SegmentMode { Stress, Recovery };

struct DeviceAgingState {
  std::vector<double> bti;            // per species ΔV_th (V)
  std::vector<double> bti_peak;       // shift at the start of the ongoing recovery phase
  std::vector<double> bti_eq_time;    // equivalent time within the current law (s)
  std::vector<bool> recovering;
  double hci = 0.0;                   // V
  double hci_eq_time = 0.0;           // s, at last_voltage
  double last_voltage = 0.0;          // V

  static DeviceAgingState fresh(std::size_t species);
  double bti_total() const;
  double total() const { return bti_total() + hci; }
};

/// Advances every BTI species by dt under stress or recovery at voltage v.
/// HCI is left untouched.
DeviceAgingState apply_stress_segment(const AgingModel& model, const DeviceAgingState& state,
                                      double v, double dt, SegmentMode mode);

/// Single-species form of apply_stress_segment, used by waveform lifting.
struct SpeciesState {
  double dvth = 0.0;
  double peak = 0.0;
  double eq_time = 0.0;
  bool recovering = false;
};
SpeciesState advance_species(const SpeciesLaws& laws, double temperature_K,
                             const SpeciesState& s, double v, double dt, SegmentMode mode);

}  // namespace avsim
