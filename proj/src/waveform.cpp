#include "avsim/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "avsim/csv.hpp"
#include "avsim/errors.hpp"

namespace avsim {

namespace {

constexpr double kVoltTol = 1e-9;

// Bisection for an increasing function f on [lo, hi] with f(lo) <= 0 <= f(hi).
template <class F>
double bisect_voltage(F f, double lo, double hi) {
  while (hi - lo > kVoltTol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string describe(const char* what, int level, double target) {
  std::ostringstream os;
  os << "no " << what << " in [0, 2*V_DD] reproduces " << target << " V at lifting level "
     << level + 1;
  return os.str();
}

double interp(double t0, double v0, double t1, double v1, double t) {
  if (v0 > 0.0 && v1 > v0 && t0 > 0.0) {
    const double s = std::log(v1 / v0) / std::log(t1 / t0);
    return v0 * std::exp(s * std::log(t / t0));
  }
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

double interp_inverse(double t0, double v0, double t1, double v1, double v) {
  if (v0 > 0.0 && v1 > v0 && t0 > 0.0) {
    const double s = std::log(v1 / v0) / std::log(t1 / t0);
    return t0 * std::exp(std::log(v / v0) / s);
  }
  if (v1 == v0) return t0;
  return t0 + (t1 - t0) * (v - v0) / (v1 - v0);
}

}  // namespace

void WorkloadStats::validate() const {
  std::ostringstream os;
  if (!(duty_factor >= 0.0 && duty_factor <= 1.0)) os << "duty_factor must lie in [0,1]; ";
  if (!(toggle_rate > 0.0 && toggle_rate <= 1.0)) os << "toggle_rate must lie in (0,1]; ";
  if (!(t_clk > 0.0) || !std::isfinite(t_clk)) os << "t_clk must be positive; ";
  if (!(transition_time > 0.0 && transition_time < t_clk)) {
    os << "transition_time must lie in (0, t_clk); ";
  }
  if (!os.str().empty()) throw ConfigError("workload: " + os.str());
}

WorkloadStats average_cell_activity(std::span<const double> duty, std::span<const double> toggle,
                                    const WorkloadStats& base) {
  if (duty.empty() || duty.size() != toggle.size()) {
    throw ConfigError("cell activity needs the same non-zero number of duty and toggle values");
  }
  WorkloadStats s = base;
  s.duty_factor = std::accumulate(duty.begin(), duty.end(), 0.0) / double(duty.size());
  s.toggle_rate = std::accumulate(toggle.begin(), toggle.end(), 0.0) / double(toggle.size());
  s.validate();
  return s;
}

EquivalentWaveform base_waveform(const WorkloadStats& stats, double v_dd) {
  stats.validate();
  if (!(v_dd > 0.0) || !std::isfinite(v_dd)) throw DomainError("V_DD must be positive");
  EquivalentWaveform w;
  w.period = stats.base_period();
  w.v_stress = v_dd;
  w.v_recovery = 0.0;
  w.stress_fraction = stats.duty_factor;
  return w;
}

SpeciesState apply_waveform(const SpeciesLaws& laws, double temperature_K,
                            const SpeciesState& state, const EquivalentWaveform& w) {
  SpeciesState s = advance_species(laws, temperature_K, state, w.v_stress, w.stress_time(),
                                   SegmentMode::Stress);
  return advance_species(laws, temperature_K, s, w.v_recovery, w.recovery_time(),
                         SegmentMode::Recovery);
}

EquivalentWaveform lift_waveform(const EquivalentWaveform& w, int n, const SpeciesLaws& laws,
                                 double temperature_K, double v_dd) {
  if (n < 1) throw DomainError("branch factor must be >= 1");
  if (n == 1) return w;

  // Brute-force reference: N periods, and the stress phases alone.
  SpeciesState full;
  SpeciesState stress_only;
  for (int i = 0; i < n; ++i) {
    full = apply_waveform(laws, temperature_K, full, w);
    stress_only = advance_species(laws, temperature_K, stress_only, w.v_stress, w.stress_time(),
                                  SegmentMode::Stress);
  }

  EquivalentWaveform out = w;
  out.level = w.level + 1;
  out.cycles_represented = w.cycles_represented * static_cast<std::uint64_t>(n);
  out.period = w.period * n;
  const double ts = out.stress_time();
  const double tr = out.recovery_time();
  const double hi = 2.0 * v_dd;
  const auto& capture = *laws.capture;
  const auto& emission = *laws.emission;

  const double target_s = stress_only.dvth;
  if (ts > 0.0 && target_s > 0.0) {
    auto f = [&](double v) { return capture(v, temperature_K, ts) - target_s; };
    if (std::abs(f(w.v_stress)) <= 1e-9 * target_s) {
      out.v_stress = w.v_stress;
    } else {
      if (f(0.0) > 0.0 || f(hi) < 0.0) {
        throw ExtrapolationError(describe("stress voltage", w.level, target_s));
      }
      out.v_stress = bisect_voltage(f, 0.0, hi);
    }
  }

  const double peak = ts > 0.0 ? capture(out.v_stress, temperature_K, ts) : 0.0;
  const double target_r = full.dvth;
  if (tr > 0.0 && peak > 0.0) {
    auto g = [&](double v) { return emission(peak, v, temperature_K, tr) - target_r; };
    const double g0 = g(0.0);
    const double g1 = g(hi);
    const double tol = 1e-12 * peak;
    if (std::abs(g0) <= tol && std::abs(g1) <= tol) {
      out.v_recovery = w.v_recovery;  // recovery has no effect (fully permanent species)
    } else if (std::abs(g(w.v_recovery)) <= tol) {
      out.v_recovery = w.v_recovery;
    } else {
      if (g0 > 0.0 || g1 < 0.0) {
        throw ExtrapolationError(describe("recovery voltage", w.level, target_r) +
                                 " (emission too slow, or 0 < r_perm < 1)");
      }
      out.v_recovery = bisect_voltage(g, 0.0, hi);
    }
  }
  return out;
}

double evaluate_ladder(const SpeciesLaws& laws, double temperature_K,
                       const std::vector<EquivalentWaveform>& ladder, int branch_factor,
                       std::uint64_t cycles) {
  SpeciesState s;
  std::uint64_t rem = cycles;
  const auto n = static_cast<std::uint64_t>(branch_factor);
  for (std::size_t k = ladder.size(); k-- > 0;) {
    const std::uint64_t unit = ladder[k].cycles_represented;
    std::uint64_t digit = rem / unit;
    rem -= digit * unit;
    if (k + 1 < ladder.size() && digit >= n) {
      throw InternalError("ladder digit exceeds the branch factor");
    }
    for (; digit > 0; --digit) s = apply_waveform(laws, temperature_K, s, ladder[k]);
  }
  return s.dvth;
}

BtiTrajectory extrapolate_bti(const WorkloadStats& stats, double v_dd, const AgingModel& model,
                              double horizon, const ExtrapolationOptions& opts) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
  if (opts.branch_factor < 2) throw DomainError("branch factor must be >= 2");
  if (!(opts.checkpoints_per_decade > 0.0)) throw DomainError("checkpoint density must be > 0");

  const EquivalentWaveform w0 = base_waveform(stats, v_dd);
  const double p0 = w0.period;
  const auto n = static_cast<std::uint64_t>(opts.branch_factor);
  const double final_cycles_d = std::ceil(horizon / p0 - 1e-6);
  if (final_cycles_d > 1e18) throw DomainError("horizon spans too many base periods");
  const auto final_cycles = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(final_cycles_d));

  // Lift until the top level spans the horizon.
  std::size_t ladder_size = 1;
  {
    std::uint64_t c = 1;
    while (c < final_cycles) {
      c *= n;
      ++ladder_size;
    }
  }

  BtiTrajectory out;
  for (const auto& laws : model.species) {
    std::vector<EquivalentWaveform> ladder{w0};
    while (ladder.size() < ladder_size) {
      ladder.push_back(lift_waveform(ladder.back(), opts.branch_factor, laws,
                                     model.bti_temperature_K, v_dd));
    }
    out.ladders.push_back(std::move(ladder));
  }

  std::vector<std::uint64_t> cycles;
  for (std::uint64_t c = 1; c <= final_cycles; c *= n) {
    cycles.push_back(c);
    if (c > final_cycles / n) break;
  }
  if (opts.first_checkpoint < horizon) {
    const double step = std::pow(10.0, 1.0 / opts.checkpoints_per_decade);
    for (double t = opts.first_checkpoint; t <= horizon; t *= step) {
      cycles.push_back(std::max<std::uint64_t>(1, std::llround(t / p0)));
    }
  }
  cycles.push_back(final_cycles);
  std::sort(cycles.begin(), cycles.end());
  cycles.erase(std::unique(cycles.begin(), cycles.end()), cycles.end());
  while (!cycles.empty() && cycles.back() > final_cycles) cycles.pop_back();

  out.species.assign(model.species.size(), {});
  for (std::uint64_t m : cycles) {
    out.t.push_back(double(m) * p0);
    double total = 0.0;
    for (std::size_t i = 0; i < model.species.size(); ++i) {
      const double dv = evaluate_ladder(model.species[i], model.bti_temperature_K, out.ladders[i],
                                        opts.branch_factor, m);
      out.species[i].push_back(dv);
      total += dv;
    }
    out.total.push_back(total);
  }
  return out;
}

// ---------------------------------------------------------------------------

BtiResponse::BtiResponse(std::vector<double> t, std::vector<double> dvth)
    : t_(std::move(t)), v_(std::move(dvth)) {
  if (t_.size() != v_.size() || t_.empty()) {
    throw DomainError("response table needs matching, non-empty columns");
  }
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!(t_[i] > 0.0) || (i > 0 && !(t_[i] > t_[i - 1]))) {
      throw DomainError("response table times must be positive and strictly increasing");
    }
    if (i > 0) v_[i] = std::max(v_[i], v_[i - 1]);  // monotone envelope
  }
}

double BtiResponse::operator()(double t) const {
  if (std::isnan(t) || t < 0.0) throw DomainError("time must be non-negative");
  if (t <= t_.front()) return v_.front() * t / t_.front();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  if (it == t_.end()) {
    const std::size_t k = t_.size();
    if (k < 2) return v_.back();
    return std::max(v_.back(), interp(t_[k - 2], v_[k - 2], t_[k - 1], v_[k - 1], t));
  }
  const std::size_t i = std::size_t(it - t_.begin());
  return interp(t_[i - 1], v_[i - 1], t_[i], v_[i], t);
}

double BtiResponse::equivalent_time(double dvth) const {
  if (std::isnan(dvth)) throw DomainError("shift must be a number");
  if (dvth <= 0.0) return 0.0;
  if (dvth <= v_.front()) return t_.front() * dvth / v_.front();
  const auto it = std::lower_bound(v_.begin(), v_.end(), dvth);
  if (it == v_.end()) {
    const std::size_t k = t_.size();
    if (k < 2 || !(v_[k - 1] > v_[k - 2])) {
      std::ostringstream os;
      os << "shift " << dvth << " V exceeds the response table maximum " << v_.back() << " V";
      throw ContinuationError(os.str());
    }
    return interp_inverse(t_[k - 2], v_[k - 2], t_[k - 1], v_[k - 1], dvth);
  }
  const std::size_t i = std::size_t(it - v_.begin());
  if (*it == dvth) return t_[i];
  return interp_inverse(t_[i - 1], v_[i - 1], t_[i], v_[i], dvth);
}

std::vector<BtiResponse> bti_responses(const BtiTrajectory& traj) {
  std::vector<BtiResponse> out;
  for (const auto& s : traj.species) out.emplace_back(traj.t, s);
  return out;
}

// ---------------------------------------------------------------------------

TransitionWaveform linear_ramp(double transition_time, double v_dd, int intervals) {
  if (intervals < 1) throw DomainError("a transition needs at least one interval");
  if (!(transition_time > 0.0)) throw DomainError("transition time must be positive");
  TransitionWaveform w;
  for (int i = 0; i <= intervals; ++i) {
    const double x = double(i) / intervals;
    w.t.push_back(x * transition_time);
    w.v.push_back(x * v_dd);
  }
  return w;
}

double gamma_factor(const TransitionWaveform& wave, double v_dd, const StressLaw& hci,
                    double temperature_K) {
  if (wave.t.size() != wave.v.size() || wave.t.size() < 2) {
    throw DomainError("transition waveform needs at least two matching samples");
  }
  if (!(v_dd > 0.0)) throw DomainError("V_DD must be positive");
  for (std::size_t i = 0; i < wave.t.size(); ++i) {
    if (i > 0 && !(wave.t[i] > wave.t[i - 1])) {
      throw DomainError("transition sample times must be strictly increasing");
    }
    const double v = wave.v[i];
    if (!(v >= -1e-12 && v <= v_dd * (1.0 + 1e-12))) {
      throw DomainError("transition voltage must lie in [0, V_DD]");
    }
  }
  const double tau = wave.t.back() - wave.t.front();
  double dv = 0.0;
  for (std::size_t i = 1; i < wave.t.size(); ++i) {
    const double v = 0.5 * (wave.v[i - 1] + wave.v[i]);
    const double t_eq = hci.time_to_reach(dv, v, temperature_K);
    dv = hci(v, temperature_K, t_eq + (wave.t[i] - wave.t[i - 1]));
  }
  if (!(dv > 0.0)) throw DomainError("transition waveform produces no HCI stress");
  const double gamma = hci.time_to_reach(dv, v_dd, temperature_K) / tau;
  return std::min(gamma, 1.0);
}

double hci_stress_time(double gamma, const WorkloadStats& stats, double total_time) {
  if (std::isnan(total_time) || total_time < 0.0) {
    throw DomainError("total time must be non-negative");
  }
  return gamma * stats.transition_time / stats.t_clk * stats.toggle_rate * total_time;
}

DeviceAgingState accumulate_hci(double gamma, const WorkloadStats& stats, double total_time,
                                double v_dd, const StressLaw& hci, double temperature_K,
                                const DeviceAgingState& state) {
  const double t_hci = hci_stress_time(gamma, stats, total_time);
  if (t_hci == 0.0) return state;
  DeviceAgingState out = state;
  const double t_eq = hci.time_to_reach(state.hci, v_dd, temperature_K);
  out.hci_eq_time = t_eq + t_hci;
  out.hci = std::max(state.hci, hci(v_dd, temperature_K, out.hci_eq_time));
  return out;
}

TransitionWaveform load_transition_csv(const std::string& path) {
  const CsvTable tab = read_csv(path);
  const std::size_t ct = tab.column("t_seconds");
  const std::size_t cv = tab.column("v_volts");
  TransitionWaveform w;
  for (std::size_t r = 0; r < tab.rows.size(); ++r) {
    w.t.push_back(tab.number(r, ct));
    w.v.push_back(tab.number(r, cv));
  }
  return w;
}

}  // namespace avsim
