#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They restate the closed-form laws directly instead of calling the library.

#include <cmath>
#include <cstdint>
#include <random>

#include "avsim/aging_models.hpp"
#include "avsim/waveform.hpp"

namespace oracle {

inline double arrhenius(double ea, double temp) {
  return std::exp(-ea / (avsim::kBoltzmannEv * temp));
}

inline double capture_k(const avsim::TrapSpecies& s, double v, double temp) {
  return s.A_c * std::exp(s.B_c * v) * arrhenius(s.E_ac, temp);
}

inline double emission_rate(const avsim::TrapSpecies& s, double v, double temp) {
  return s.A_e * std::exp(-s.B_e * v) * arrhenius(s.E_ae, temp);
}

/// Cycle-by-cycle simulation of one trap species under the base waveform:
/// stress at v_dd for duty·P, then recovery at 0 V for (1 − duty)·P.
inline double brute_force_species(const avsim::TrapSpecies& s, const avsim::WorkloadStats& w,
                                  double v_dd, double temp, std::uint64_t cycles) {
  const double period = w.t_clk / w.toggle_rate;
  const double ts = w.duty_factor * period;
  const double tr = period - ts;
  const double k = oracle::capture_k(s, v_dd, temp);
  const double rate = oracle::emission_rate(s, 0.0, temp);
  const double keep = s.r_perm + (1.0 - s.r_perm) * std::exp(-std::pow(rate * tr, s.beta_e));
  double dv = 0.0;
  for (std::uint64_t i = 0; i < cycles; ++i) {
    if (ts > 0.0) {
      const double teq = dv > 0.0 ? std::pow(dv / k, 1.0 / s.n_c) : 0.0;
      dv = k * std::pow(teq + ts, s.n_c);
    }
    if (tr > 0.0) dv *= keep;
  }
  return dv;
}

/// (1 − e^{−c})/c with c = B·V_DD/n: the γ factor of a linear 0 → V_DD ramp
/// under K·e^{B·V}·t^n.
inline double gamma_linear_ramp(double b, double v_dd, double n) {
  const double c = b * v_dd / n;
  return (1.0 - std::exp(-c)) / c;
}

/// Σ over `intervals` equal steps of a linear ramp of K·e^{B·V}·t^n, each
/// step at its midpoint voltage and continued by equivalent time.
inline double hci_over_ramp(const avsim::HciParams& p, double v_dd, double tau, int intervals,
                            double temp) {
  const double dt = tau / intervals;
  double dv = 0.0;
  for (int i = 0; i < intervals; ++i) {
    const double v = v_dd * (i + 0.5) / intervals;
    const double k = p.A_h * std::exp(p.B_h * v) * arrhenius(p.E_ah, temp);
    const double teq = dv > 0.0 ? std::pow(dv / k, 1.0 / p.n_h) : 0.0;
    dv = k * std::pow(teq + dt, p.n_h);
  }
  return dv;
}

/// Random fully recoverable species (r_perm = 0) whose emission is fast
/// enough for waveform lifting: A_e·t_r spans 10^-0.5 .. 10^2.
inline avsim::TrapSpecies random_species(std::mt19937_64& rng, double base_recovery_time) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  avsim::TrapSpecies s;
  s.name = "recoverable";
  s.A_c = 1e-4 * std::pow(10.0, 2.0 * u(rng));
  s.B_c = 2.0 + 5.0 * u(rng);
  s.E_ac = 0.1 * u(rng);
  s.n_c = 0.05 + 0.25 * u(rng);
  s.A_e = std::pow(10.0, -0.5 + 2.5 * u(rng)) / base_recovery_time;
  s.B_e = 30.0 + 30.0 * u(rng);
  s.E_ae = 0.0;
  s.beta_e = 0.3 + 0.4 * u(rng);
  s.r_perm = 0.0;
  return s;
}

/// Random permanent species (r_perm = 1).
inline avsim::TrapSpecies random_permanent_species(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  avsim::TrapSpecies s;
  s.name = "permanent";
  s.A_c = 1e-3 * std::pow(10.0, 2.0 * u(rng));
  s.B_c = 2.0 + 5.0 * u(rng);
  s.E_ac = 0.1 * u(rng);
  s.n_c = 0.02 + 0.2 * u(rng);
  s.A_e = 1e-3;
  s.B_e = 1.0;
  s.beta_e = 0.5;
  s.r_perm = 1.0;
  return s;
}

}  // namespace oracle
