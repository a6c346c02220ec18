#include "avsim/aging_models.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "avsim/errors.hpp"

namespace avsim {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << what << " must be finite (got " << x << ")";
    throw DomainError(os.str());
  }
}

void require_time(double t) {
  require_finite(t, "time");
  if (t < 0.0) {
    std::ostringstream os;
    os << "time must be non-negative (got " << t << ")";
    throw DomainError(os.str());
  }
}

double arrhenius(double activation_ev, double temperature_K) {
  if (!(temperature_K > 0.0)) throw DomainError("temperature must be positive");
  return std::exp(-activation_ev / (kBoltzmannEv * temperature_K));
}

}  // namespace

void TrapSpecies::validate() const {
  std::ostringstream os;
  if (!(A_c >= 0.0) || !(A_e >= 0.0)) os << "prefactors must be >= 0; ";
  if (!(n_c > 0.0 && n_c < 1.0)) os << "n_c must lie in (0,1); ";
  if (!(beta_e > 0.0 && beta_e <= 1.0)) os << "beta_e must lie in (0,1]; ";
  if (!(r_perm >= 0.0 && r_perm <= 1.0)) os << "r_perm must lie in [0,1]; ";
  for (double x : {A_c, B_c, E_ac, n_c, A_e, B_e, E_ae, beta_e, r_perm}) {
    if (!std::isfinite(x)) os << "non-finite parameter; ";
  }
  if (!os.str().empty()) throw ConfigError("trap species '" + name + "': " + os.str());
}

void HciParams::validate() const {
  std::ostringstream os;
  if (!(A_h >= 0.0)) os << "A_h must be >= 0; ";
  if (!(n_h > 0.0 && n_h < 1.0)) os << "n_h must lie in (0,1); ";
  for (double x : {A_h, B_h, E_ah, n_h}) {
    if (!std::isfinite(x)) os << "non-finite parameter; ";
  }
  if (!os.str().empty()) throw ConfigError("hci: " + os.str());
}

void AgingParams::validate() const {
  for (const auto& s : bti_traps) s.validate();
  hci_pmos.validate();
  hci_nmos.validate();
  if (!(bti_temperature() > 0.0) || !(hci_temperature() > 0.0)) {
    throw ConfigError("temperature must be positive");
  }
}

AgingParams AgingParams::defaults() {
  AgingParams p;
  TrapSpecies fast;
  fast.name = "fast";
  fast.A_c = 1.55004e-4;
  fast.B_c = 6.78816;
  fast.E_ac = 0.1;
  fast.n_c = 0.0916929;
  fast.A_e = 5e10;
  fast.B_e = 50.0;
  fast.E_ae = 0.1;
  fast.beta_e = 0.5;
  fast.r_perm = 0.0;
  TrapSpecies slow;
  slow.name = "slow";
  slow.A_c = 5.12786e-2;
  slow.B_c = 3.75014;
  slow.E_ac = 0.1;
  slow.n_c = 0.0308791;
  slow.A_e = 1e-3;
  slow.B_e = 1.0;
  slow.E_ae = 0.1;
  slow.beta_e = 0.3;
  slow.r_perm = 1.0;
  p.bti_traps = {fast, slow};
  p.hci_pmos = {3.35818e-3, 3.00241, 0.05, 0.132767};
  p.hci_nmos = {4.32298e-6, 7.24415, 0.05, 0.599979};
  return p;
}

double bti_trapping(const TrapSpecies& s, double v_g, double temperature_K, double t) {
  require_time(t);
  require_finite(v_g, "gate voltage");
  if (v_g < 0.0) throw DomainError("gate voltage must be non-negative");
  return PowerLaw::capture(s)(v_g, temperature_K, t);
}

double emission_rate(const TrapSpecies& s, double v_rec, double temperature_K) {
  return s.A_e * std::exp(-s.B_e * v_rec) * arrhenius(s.E_ae, temperature_K);
}

double bti_detrapping(const TrapSpecies& s, double dvth_0, double v_rec, double temperature_K,
                      double t) {
  require_finite(dvth_0, "initial shift");
  if (dvth_0 < 0.0) throw DomainError("initial shift must be non-negative");
  return StretchedExpRecovery(s)(dvth_0, v_rec, temperature_K, t);
}

double hci_law(const HciParams& p, double v, double temperature_K, double t) {
  return PowerLaw::hci(p)(v, temperature_K, t);
}

// ---------------------------------------------------------------------------

double StressLaw::time_to_reach(double dvth, double v, double temperature_K,
                                double horizon) const {
  require_finite(dvth, "shift");
  if (dvth <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 10.0 * horizon;
  const double top = (*this)(v, temperature_K, hi);
  if (!(top >= dvth)) {
    std::ostringstream os;
    os << "shift " << dvth << " V is not reachable at " << v << " V within " << hi
       << " s (law saturates at " << top << " V)";
    throw ContinuationError(os.str());
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f = (*this)(v, temperature_K, mid);
    if (std::abs(f - dvth) <= 1e-10 * dvth) return mid;
    (f < dvth ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double RecoveryLaw::time_to_reach(double peak, double current, double v, double temperature_K,
                                  double horizon) const {
  if (current >= peak) return 0.0;
  const double asymptote = (*this)(peak, v, temperature_K, std::numeric_limits<double>::infinity());
  if (current <= asymptote) return std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = 10.0 * horizon;
  if ((*this)(peak, v, temperature_K, hi) > current) {
    throw ContinuationError("recovery target not reachable within the bisection bracket");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f = (*this)(peak, v, temperature_K, mid);
    if (std::abs(f - current) <= 1e-10 * current) return mid;
    (f > current ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PowerLaw::PowerLaw(double prefactor, double accel, double activation_ev, double exponent)
    : prefactor_(prefactor), accel_(accel), activation_(activation_ev), exponent_(exponent) {}

PowerLaw PowerLaw::capture(const TrapSpecies& s) { return {s.A_c, s.B_c, s.E_ac, s.n_c}; }

PowerLaw PowerLaw::hci(const HciParams& p) { return {p.A_h, p.B_h, p.E_ah, p.n_h}; }

double PowerLaw::rate_constant(double v, double temperature_K) const {
  return prefactor_ * std::exp(accel_ * v) * arrhenius(activation_, temperature_K);
}

double PowerLaw::operator()(double v, double temperature_K, double t) const {
  require_time(t);
  require_finite(v, "voltage");
  if (t == 0.0) return 0.0;
  return rate_constant(v, temperature_K) * std::pow(t, exponent_);
}

double PowerLaw::time_to_reach(double dvth, double v, double temperature_K, double) const {
  require_finite(dvth, "shift");
  if (dvth <= 0.0) return 0.0;
  const double k = rate_constant(v, temperature_K);
  if (!(k > 0.0)) {
    throw ContinuationError("power law with zero rate cannot reach a positive shift");
  }
  return std::pow(dvth / k, 1.0 / exponent_);
}

double StretchedExpRecovery::operator()(double peak, double v, double temperature_K,
                                        double t) const {
  if (std::isnan(t) || t < 0.0) throw DomainError("recovery time must be non-negative");
  if (peak == 0.0 || t == 0.0) return peak;
  const double r = species_.r_perm;
  const double rate = emission_rate(species_, v, temperature_K);
  const double x = std::pow(t * rate, species_.beta_e);
  return peak * (r + (1.0 - r) * std::exp(-x));
}

double StretchedExpRecovery::time_to_reach(double peak, double current, double v,
                                           double temperature_K, double) const {
  if (current >= peak || peak <= 0.0) return 0.0;
  const double r = species_.r_perm;
  if (r >= 1.0) return 0.0;
  const double frac = (current / peak - r) / (1.0 - r);
  if (frac <= 0.0) return std::numeric_limits<double>::infinity();
  const double rate = emission_rate(species_, v, temperature_K);
  if (!(rate > 0.0)) {
    throw ContinuationError("recovery with zero emission rate cannot lower the shift");
  }
  return std::pow(-std::log(frac), 1.0 / species_.beta_e) / rate;
}

double equivalent_time(const StressLaw& law, double dvth, double v, double temperature_K,
                       double horizon) {
  if (dvth < 0.0) throw DomainError("shift must be non-negative");
  return law.time_to_reach(dvth, v, temperature_K, horizon);
}

AgingModel AgingModel::from_params(const AgingParams& p) {
  p.validate();
  AgingModel m;
  for (const auto& s : p.bti_traps) {
    m.species.push_back({std::make_shared<PowerLaw>(PowerLaw::capture(s)),
                         std::make_shared<StretchedExpRecovery>(s)});
  }
  m.hci_pmos = std::make_shared<PowerLaw>(PowerLaw::hci(p.hci_pmos));
  m.hci_nmos = std::make_shared<PowerLaw>(PowerLaw::hci(p.hci_nmos));
  m.bti_temperature_K = p.bti_temperature();
  m.hci_temperature_K = p.hci_temperature();
  return m;
}

// ---------------------------------------------------------------------------

DeviceAgingState DeviceAgingState::fresh(std::size_t species) {
  DeviceAgingState s;
  s.bti.assign(species, 0.0);
  s.bti_peak.assign(species, 0.0);
  s.bti_eq_time.assign(species, 0.0);
  s.recovering.assign(species, false);
  return s;
}

double DeviceAgingState::bti_total() const { return std::accumulate(bti.begin(), bti.end(), 0.0); }

SpeciesState advance_species(const SpeciesLaws& laws, double temperature_K,
                             const SpeciesState& s, double v, double dt, SegmentMode mode) {
  if (std::isnan(dt) || dt < 0.0) throw DomainError("segment duration must be non-negative");
  if (dt == 0.0) return s;
  SpeciesState out = s;
  if (mode == SegmentMode::Stress) {
    const double t_eq = laws.capture->time_to_reach(s.dvth, v, temperature_K);
    out.eq_time = t_eq + dt;
    out.dvth = (*laws.capture)(v, temperature_K, out.eq_time);
    out.recovering = false;
    out.peak = out.dvth;
  } else {
    double t_eq = 0.0;
    if (s.recovering) {
      t_eq = laws.emission->time_to_reach(s.peak, s.dvth, v, temperature_K);
    } else {
      out.peak = s.dvth;
      out.recovering = true;
    }
    out.eq_time = t_eq + dt;
    out.dvth = (*laws.emission)(out.peak, v, temperature_K, out.eq_time);
  }
  return out;
}

DeviceAgingState apply_stress_segment(const AgingModel& model, const DeviceAgingState& state,
                                      double v, double dt, SegmentMode mode) {
  if (state.bti.size() != model.species.size()) {
    throw DomainError("device state and aging model disagree on the number of trap species");
  }
  if (std::isnan(dt) || dt < 0.0) throw DomainError("segment duration must be non-negative");
  if (dt == 0.0) return state;
  DeviceAgingState out = state;
  for (std::size_t i = 0; i < model.species.size(); ++i) {
    const SpeciesState in{state.bti[i], state.bti_peak[i], state.bti_eq_time[i],
                          state.recovering[i]};
    const SpeciesState next =
        advance_species(model.species[i], model.bti_temperature_K, in, v, dt, mode);
    out.bti[i] = next.dvth;
    out.bti_peak[i] = next.peak;
    out.bti_eq_time[i] = next.eq_time;
    out.recovering[i] = next.recovering;
  }
  out.last_voltage = v;
  return out;
}

}  // namespace avsim
