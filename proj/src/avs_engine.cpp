#include "avsim/avs_engine.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "avsim/csv.hpp"
#include "avsim/errors.hpp"

namespace avsim {

void AvsConfig::validate() const {
  std::ostringstream os;
  if (!(v_init > 0.0)) os << "v_init must be > 0; ";
  if (!(v_step > 0.0)) os << "v_step must be > 0; ";
  if (!(v_init <= v_max_cap)) os << "v_init must not exceed v_max_cap; ";
  if (!(t_clk > 0.0)) os << "t_clk must be > 0; ";
  if (!(delay_threshold > 0.0)) os << "delay_threshold must be > 0; ";
  if (!(horizon > 0.0) || !std::isfinite(horizon)) os << "horizon must be > 0; ";
  if (!(checkpoints_per_decade > 0.0)) os << "checkpoints_per_decade must be > 0; ";
  if (!(first_checkpoint > 0.0)) os << "first_checkpoint must be > 0; ";
  if (!(locate_tolerance > 0.0)) os << "locate_tolerance must be > 0; ";
  if (branch_factor < 2) os << "branch_factor must be >= 2; ";
  if (transition_intervals < 1) os << "transition_intervals must be >= 1; ";
  if (!os.str().empty()) throw ConfigError("avs: " + os.str());
}

// ---------------------------------------------------------------------------

AgingEvaluator::AgingEvaluator(AgingModel model, WorkloadStats stats, double horizon,
                               ExtrapolationOptions opts, int transition_intervals,
                               std::optional<TransitionWaveform> transition_shape)
    : model_(std::move(model)),
      stats_(stats),
      horizon_(horizon),
      opts_(opts),
      intervals_(transition_intervals),
      shape_(std::move(transition_shape)) {
  stats_.validate();
  if (shape_) {
    double vmax = 0.0;
    for (double v : shape_->v) vmax = std::max(vmax, v);
    if (!(vmax > 0.0)) throw ConfigError("transition waveform never rises above 0 V");
    for (double& v : shape_->v) v /= vmax;
  }
}

const std::vector<BtiResponse>& AgingEvaluator::bti(double v_dd) {
  const std::lock_guard<std::mutex> lock(mu_);
  const auto k = key(v_dd);
  auto it = bti_.find(k);
  if (it == bti_.end()) {
    const BtiTrajectory traj = extrapolate_bti(stats_, v_dd, model_, horizon_, opts_);
    it = bti_.emplace(k, bti_responses(traj)).first;
  }
  return it->second;
}

TransitionWaveform AgingEvaluator::transition_at(double v_dd) const {
  if (!shape_) return linear_ramp(stats_.transition_time, v_dd, intervals_);
  TransitionWaveform w = *shape_;
  for (double& v : w.v) v *= v_dd;
  return w;
}

std::pair<double, double> AgingEvaluator::gammas(double v_dd) {
  const std::lock_guard<std::mutex> lock(mu_);
  const auto k = key(v_dd);
  auto it = gamma_.find(k);
  if (it == gamma_.end()) {
    const TransitionWaveform w = transition_at(v_dd);
    const double gp = gamma_factor(w, v_dd, *model_.hci_pmos, model_.hci_temperature_K);
    const double gn = gamma_factor(w, v_dd, *model_.hci_nmos, model_.hci_temperature_K);
    it = gamma_.emplace(k, std::make_pair(gp, gn)).first;
  }
  return it->second;
}

double AgingSnapshot::pmos_bti() const { return std::accumulate(bti.begin(), bti.end(), 0.0); }

// ---------------------------------------------------------------------------

double locate_violation(const std::function<double(double)>& delay_ns_at, double threshold_ns,
                        double t_lo, double t_hi, double tol) {
  const double d_lo = delay_ns_at(t_lo);
  const double d_hi = delay_ns_at(t_hi);
  if (!(t_hi > t_lo) || !(d_lo <= threshold_ns) || !(d_hi > threshold_ns)) {
    std::ostringstream os;
    os.precision(12);
    os << "violation bracket does not straddle the threshold " << threshold_ns << " ns: delay("
       << t_lo << " s) = " << d_lo << " ns, delay(" << t_hi << " s) = " << d_hi << " ns";
    throw InternalError(os.str());
  }
  double lo = t_lo;
  double hi = t_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (delay_ns_at(mid) <= threshold_ns ? lo : hi) = mid;
  }
  return lo;
}

namespace {

struct EpochState {
  double v = 0.0;
  double t0 = 0.0;
  std::vector<double> bti_eq;
  double hp_eq = 0.0;
  double hn_eq = 0.0;
};

class Loop {
 public:
  Loop(const AvsConfig& cfg, AgingEvaluator& aging, const DelaySurrogate& model)
      : cfg_(cfg), aging_(aging), model_(model), thr_ns_(cfg.delay_threshold * 1e9) {}

  AgingSnapshot snapshot(const EpochState& e, double t) {
    const double tau = t - e.t0;
    const AgingModel& m = aging_.model();
    AgingSnapshot s;
    const auto& resp = aging_.bti(e.v);
    for (std::size_t i = 0; i < resp.size(); ++i) s.bti.push_back(resp[i](e.bti_eq[i] + tau));
    const double tp = hci_stress_time(aging_.gamma_pmos(e.v), aging_.stats(), tau);
    const double tn = hci_stress_time(aging_.gamma_nmos(e.v), aging_.stats(), tau);
    s.pmos_hci = (*m.hci_pmos)(e.v, m.hci_temperature_K, e.hp_eq + tp);
    s.nmos_hci = (*m.hci_nmos)(e.v, m.hci_temperature_K, e.hn_eq + tn);
    return s;
  }

  double delay(const EpochState& e, const AgingSnapshot& s) {
    const DelayEval d = model_.evaluate(s.pmos_total(), s.nmos_hci, e.v);
    if (d.out_of_domain) ++traj_.out_of_domain_evals;
    return d.delay_ns;
  }

  double delay_at(const EpochState& e, double t) { return delay(e, snapshot(e, t)); }

  EpochState continue_at(const EpochState& prev, double t, double v_new) {
    const AgingSnapshot s = snapshot(prev, t);
    const AgingModel& m = aging_.model();
    EpochState e;
    e.v = v_new;
    e.t0 = t;
    const auto& resp = aging_.bti(v_new);
    for (std::size_t i = 0; i < resp.size(); ++i) e.bti_eq.push_back(resp[i].equivalent_time(s.bti[i]));
    e.hp_eq = m.hci_pmos->time_to_reach(s.pmos_hci, v_new, m.hci_temperature_K);
    e.hn_eq = m.hci_nmos->time_to_reach(s.nmos_hci, v_new, m.hci_temperature_K);
    return e;
  }

  void record(const EpochState& e, double t) {
    const AgingSnapshot s = snapshot(e, t);
    Checkpoint c{t, e.v, delay(e, s), s.pmos_total(), s.nmos_hci, s.pmos_bti(), s.pmos_hci};
    if (!traj_.checkpoints.empty() && traj_.checkpoints.back().t == t) {
      traj_.checkpoints.back() = c;
    } else {
      traj_.checkpoints.push_back(c);
    }
  }

  // Steps the voltage at t until the delay is back under the threshold.
  // Returns false if the cap stops the run.
  bool step_at(EpochState& e, double t) {
    for (;;) {
      const double before = delay_at(e, t);
      traj_.violations.push_back({t, e.v, before});
      const double v_new = cfg_.v_init + double(steps_ + 1) * cfg_.v_step;
      if (v_new > cfg_.v_max_cap + 1e-12) {
        traj_.capped = true;
        return false;
      }
      const double v_old = e.v;
      traj_.epochs.back().t_end = t;
      e = continue_at(e, t, v_new);
      ++steps_;
      traj_.epochs.push_back({v_new, t, t});
      const double after = delay_at(e, t);
      traj_.steps.push_back({t, v_old, e.v, before, after});
      if (after <= thr_ns_) return true;
    }
  }

  AvsTrajectory run() {
    cfg_.validate();
    traj_.v_init = cfg_.v_init;
    traj_.v_step = cfg_.v_step;
    EpochState e;
    e.v = cfg_.v_init;
    e.bti_eq.assign(aging_.model().species.size(), 0.0);
    const double nominal = model_.eval(0.0, 0.0, cfg_.v_init);
    if (!(nominal <= thr_ns_)) {
      std::ostringstream os;
      os << "nominal delay " << nominal << " ns exceeds the delay threshold " << thr_ns_ << " ns";
      throw ConfigError(os.str());
    }
    traj_.epochs.push_back({e.v, 0.0, 0.0});
    record(e, 0.0);

    std::vector<double> grid;
    const double ratio = std::pow(10.0, 1.0 / cfg_.checkpoints_per_decade);
    for (int k = 0;; ++k) {
      const double g = cfg_.first_checkpoint * std::pow(ratio, k);
      if (!(g < cfg_.horizon)) break;
      grid.push_back(g);
    }
    grid.push_back(cfg_.horizon);

    double t = 0.0;
    for (const double g : grid) {
      while (delay_at(e, g) > thr_ns_) {
        double t_v = t;
        if (delay_at(e, t) <= thr_ns_) {
          const double t_star = locate_violation([&](double x) { return delay_at(e, x); }, thr_ns_,
                                                 t, g, cfg_.locate_tolerance);
          t_v = std::min(t_star + cfg_.locate_tolerance, g);
        }
        if (!step_at(e, t_v)) {
          traj_.epochs.back().t_end = t_v;
          record(e, t_v);
          return std::move(traj_);
        }
        record(e, t_v);
        t = t_v;
      }
      record(e, g);
      t = g;
    }
    traj_.epochs.back().t_end = cfg_.horizon;
    return std::move(traj_);
  }

 private:
  const AvsConfig& cfg_;
  AgingEvaluator& aging_;
  const DelaySurrogate& model_;
  double thr_ns_;
  int steps_ = 0;
  AvsTrajectory traj_;
};

}  // namespace

AvsTrajectory simulate(const AvsConfig& cfg, AgingEvaluator& aging, const DelaySurrogate& model) {
  return Loop(cfg, aging, model).run();
}

AvsTrajectory simulate(const AvsConfig& cfg, const AgingParams& params, const WorkloadStats& stats,
                       const DelaySurrogate& model) {
  cfg.validate();
  AgingEvaluator aging(AgingModel::from_params(params), stats, cfg.horizon,
                       {cfg.branch_factor, cfg.checkpoints_per_decade, cfg.first_checkpoint},
                       cfg.transition_intervals);
  return simulate(cfg, aging, model);
}

AgingSnapshot constant_voltage_aging(AgingEvaluator& aging, double v_dd, double t, bool recovery) {
  const AgingModel& m = aging.model();
  AgingSnapshot s;
  if (recovery) {
    for (const auto& r : aging.bti(v_dd)) s.bti.push_back(r(t));
  } else {
    const double ts = aging.stats().duty_factor * t;
    for (const auto& sp : m.species) s.bti.push_back((*sp.capture)(v_dd, m.bti_temperature_K, ts));
  }
  s.pmos_hci = (*m.hci_pmos)(v_dd, m.hci_temperature_K,
                             hci_stress_time(aging.gamma_pmos(v_dd), aging.stats(), t));
  s.nmos_hci = (*m.hci_nmos)(v_dd, m.hci_temperature_K,
                             hci_stress_time(aging.gamma_nmos(v_dd), aging.stats(), t));
  return s;
}

double ScenarioReport::pmos_reduction() const {
  return 1.0 - rows.at(3).pmos_total() / rows.at(2).pmos_total();
}

double ScenarioReport::nmos_reduction() const { return 1.0 - rows.at(3).nmos / rows.at(2).nmos; }

ScenarioReport compare_scenarios(const AvsConfig& cfg, AgingEvaluator& aging,
                                 const DelaySurrogate& model) {
  ScenarioReport rep;
  rep.avs = simulate(cfg, aging, model);
  auto row = [](std::string name, double v, const AgingSnapshot& s) {
    return ScenarioRow{std::move(name), v, s.pmos_hci, s.pmos_bti(), s.nmos_hci};
  };
  const double h = cfg.horizon;
  rep.rows.push_back(row("a_nominal_no_recovery", cfg.v_init,
                         constant_voltage_aging(aging, cfg.v_init, h, false)));
  rep.rows.push_back(row("b_nominal_recovery", cfg.v_init,
                         constant_voltage_aging(aging, cfg.v_init, h, true)));
  const double vf = rep.avs.v_final();
  rep.rows.push_back(row("c_vfinal_constant", vf, constant_voltage_aging(aging, vf, h, false)));
  const Checkpoint& f = rep.avs.final_state();
  rep.rows.push_back(ScenarioRow{"d_avs", vf, f.pmos_hci, f.pmos_bti, f.dvth_n});
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string trajectory_csv(const AvsTrajectory& traj) {
  std::ostringstream os;
  os << "t_s,v_dd_v,delay_ns,dvth_p_mv,dvth_n_mv\n";
  for (const auto& c : traj.checkpoints) {
    os << fmt_double(c.t) << "," << fmt_double(c.v_dd) << "," << fmt_double(c.delay_ns) << ","
       << fmt_double(c.dvth_p * 1e3) << "," << fmt_double(c.dvth_n * 1e3) << "\n";
  }
  return os.str();
}

std::string events_csv(const AvsTrajectory& traj) {
  struct Row {
    double t;
    int order;
    std::string event;
    std::string detail;
  };
  std::vector<Row> rows;
  int order = 0;
  for (const auto& v : traj.violations) {
    rows.push_back({v.t, order++, "violation",
                    "v_dd=" + fixed(v.v_dd, 3) + " V; delay=" + fixed(v.delay_ns, 6) + " ns"});
  }
  for (const auto& s : traj.steps) {
    rows.push_back({s.t, order++, "step",
                    fixed(s.v_old, 3) + "->" + fixed(s.v_new, 3) + " V; delay " +
                        fixed(s.delay_before_ns, 6) + "->" + fixed(s.delay_after_ns, 6) + " ns"});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
  std::ostringstream os;
  os << "t_s,event,detail\n";
  for (const auto& r : rows) os << fmt_double(r.t) << "," << r.event << "," << r.detail << "\n";
  if (traj.capped) {
    os << fmt_double(traj.checkpoints.back().t) << ",cap,v_max_cap reached; run terminated\n";
  }
  if (traj.out_of_domain_evals > 0) {
    os << fmt_double(traj.checkpoints.back().t) << ",warning," << traj.out_of_domain_evals
       << " delay evaluations outside the surrogate fit domain\n";
  }
  return os.str();
}

std::string scenario_csv(const ScenarioReport& rep) {
  std::ostringstream os;
  os << "scenario,pmos_hci_mv,pmos_bti_mv,pmos_total_mv,nmos_mv\n";
  for (const auto& r : rep.rows) {
    os << r.name << "," << fixed(r.pmos_hci * 1e3, 3) << "," << fixed(r.pmos_bti * 1e3, 3) << ","
       << fixed(r.pmos_total() * 1e3, 3) << "," << fixed(r.nmos * 1e3, 3) << "\n";
  }
  return os.str();
}

std::string scenario_text(const ScenarioReport& rep) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %6s %9s %9s %10s %9s\n", "scenario", "V_DD", "PMOS HCI",
                "PMOS BTI", "PMOS total", "NMOS");
  os << line;
  for (const auto& r : rep.rows) {
    std::snprintf(line, sizeof line, "%-24s %6.3f %9.1f %9.1f %10.1f %9.1f\n", r.name.c_str(),
                  r.v_dd, r.pmos_hci * 1e3, r.pmos_bti * 1e3, r.pmos_total() * 1e3, r.nmos * 1e3);
    os << line;
  }
  const auto& a = rep.rows.at(0);
  const auto& b = rep.rows.at(1);
  std::snprintf(line, sizeof line, "recovery (a->b): PMOS -%.1f%%, NMOS -%.1f%%\n",
                100.0 * (1.0 - b.pmos_total() / a.pmos_total()), 100.0 * (1.0 - b.nmos / a.nmos));
  os << line;
  std::snprintf(line, sizeof line, "history  (c->d): PMOS -%.1f%%, NMOS -%.1f%%\n",
                100.0 * rep.pmos_reduction(), 100.0 * rep.nmos_reduction());
  os << line;
  if (rep.avs.capped) os << "warning: AVS run hit v_max_cap\n";
  if (rep.avs.out_of_domain_evals > 0) {
    os << "warning: " << rep.avs.out_of_domain_evals
       << " delay evaluations fell outside the surrogate fit domain\n";
  }
  return os.str();
}

}  // namespace avsim
