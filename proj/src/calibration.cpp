#include "avsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "avsim/errors.hpp"
#include "avsim/power_report.hpp"
#include "avsim/run.hpp"

namespace avsim {

CalibrationTargets reference_targets() {
  CalibrationTargets t;
  t.rows = {{"a_nominal_no_recovery", 82.0, 50.5, 62.2, 19.8},
            {"b_nominal_recovery", 73.1, 46.1, 54.9, 18.2},
            {"c_vfinal_constant", 130.7, 105.2, 103.4, 27.3},
            {"d_avs", 105.3, 85.1, 81.6, 23.7}};
  t.pmos_reduction = 0.194;
  t.nmos_reduction = 0.191;
  t.v_final = 1.02;
  t.v_eff = 0.99;
  return t;
}

namespace {

const ScenarioRow& row_named(const ScenarioReport& rep, const std::string& name) {
  for (const auto& r : rep.rows) {
    if (r.name == name) return r;
  }
  throw InternalError("scenario report has no row '" + name + "'");
}

double rel(double got_v, double want_mv) { return (got_v * 1e3 - want_mv) / want_mv; }

}  // namespace

double calibration_objective(const ScenarioReport& rep, const CalibrationTargets& targets) {
  double e = 0.0;
  for (const auto& t : targets.rows) {
    const ScenarioRow& r = row_named(rep, t.scenario);
    for (double x : {rel(r.pmos_total(), t.pmos_total), rel(r.nmos, t.nmos)}) {
      e += x * x + 50.0 * std::pow(std::max(0.0, std::abs(x) - 0.04), 2);
    }
    e += 0.3 * std::pow(rel(r.pmos_bti, t.pmos_bti), 2) + 0.3 * std::pow(rel(r.pmos_hci, t.pmos_hci), 2);
  }
  e += std::pow(5.0 * (rep.pmos_reduction() - targets.pmos_reduction), 2);
  e += std::pow(5.0 * (rep.nmos_reduction() - targets.nmos_reduction), 2);
  e += std::pow(10.0 * (rep.avs.v_final() - targets.v_final), 2);
  e += std::pow(10.0 * (effective_voltage(rep.avs) - targets.v_eff), 2);
  return e;
}

double max_relative_error(const ScenarioReport& rep, const CalibrationTargets& targets) {
  double worst = 0.0;
  for (const auto& t : targets.rows) {
    const ScenarioRow& r = row_named(rep, t.scenario);
    for (double x : {rel(r.pmos_total(), t.pmos_total), rel(r.nmos, t.nmos),
                     rel(r.pmos_bti, t.pmos_bti), rel(r.pmos_hci, t.pmos_hci)}) {
      worst = std::max(worst, std::abs(x));
    }
  }
  return worst;
}

double evaluate_config(const RunConfig& cfg, const CalibrationTargets& targets,
                       ScenarioReport* report) {
  try {
    cfg.validate();
    const DelaySurrogate model = obtain_surrogate(cfg);
    auto aging = make_evaluator(cfg);
    ScenarioReport rep = compare_scenarios(cfg.avs, *aging, model);
    const double e = calibration_objective(rep, targets);
    if (report) *report = std::move(rep);
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

CalibrationResult calibrate(const RunConfig& cfg, const CalibrationTargets& targets, int sweeps,
                            bool include_delay, std::ostream& log) {
  struct Coord {
    std::string name;
    std::function<double&(RunConfig&)> ref;
    bool log_scale;
    double step;
  };
  std::vector<Coord> coords;
  auto add = [&](std::string name, std::function<double&(RunConfig&)> ref, bool log_scale,
                 double step) { coords.push_back({std::move(name), std::move(ref), log_scale, step}); };
  for (std::size_t i = 0; i < cfg.aging.bti_traps.size(); ++i) {
    const std::string n = cfg.aging.bti_traps[i].name;
    add(n + ".A_c", [i](RunConfig& c) -> double& { return c.aging.bti_traps[i].A_c; }, true, 0.05);
    add(n + ".B_c", [i](RunConfig& c) -> double& { return c.aging.bti_traps[i].B_c; }, false, 0.2);
    add(n + ".n_c", [i](RunConfig& c) -> double& { return c.aging.bti_traps[i].n_c; }, false, 0.01);
  }
  add("hci_pmos.A_h", [](RunConfig& c) -> double& { return c.aging.hci_pmos.A_h; }, true, 0.05);
  add("hci_pmos.B_h", [](RunConfig& c) -> double& { return c.aging.hci_pmos.B_h; }, false, 0.2);
  add("hci_pmos.n_h", [](RunConfig& c) -> double& { return c.aging.hci_pmos.n_h; }, false, 0.01);
  add("hci_nmos.A_h", [](RunConfig& c) -> double& { return c.aging.hci_nmos.A_h; }, true, 0.05);
  add("hci_nmos.B_h", [](RunConfig& c) -> double& { return c.aging.hci_nmos.B_h; }, false, 0.2);
  add("hci_nmos.n_h", [](RunConfig& c) -> double& { return c.aging.hci_nmos.n_h; }, false, 0.01);
  if (include_delay) {
    add("delay.vth0", [](RunConfig& c) -> double& { return c.delay.synthetic.vth0; }, false, 0.01);
    add("delay.alpha", [](RunConfig& c) -> double& { return c.delay.synthetic.alpha; }, false, 0.02);
    add("delay.w_p", [](RunConfig& c) -> double& { return c.delay.synthetic.w_p; }, false, 0.02);
    add("delay.w_n", [](RunConfig& c) -> double& { return c.delay.synthetic.w_n; }, false, 0.01);
  }

  CalibrationResult best;
  best.config = cfg;
  best.objective = evaluate_config(cfg, targets);
  best.evaluations = 1;
  log << "start objective " << best.objective << "\n";

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool improved = false;
    for (auto& c : coords) {
      for (double dir : {1.0, -1.0}) {
        RunConfig trial = best.config;
        double& x = c.ref(trial);
        x = c.log_scale ? x * std::exp(dir * c.step) : x + dir * c.step;
        const double e = evaluate_config(trial, targets);
        ++best.evaluations;
        if (e < best.objective) {
          best.config = std::move(trial);
          best.objective = e;
          improved = true;
          log << "sweep " << sweep << " " << c.name << " -> " << c.ref(best.config)
              << " objective " << e << "\n";
          break;
        }
      }
    }
    if (!improved) {
      for (auto& c : coords) c.step *= 0.5;
      log << "sweep " << sweep << " no improvement, halving steps\n";
    }
  }
  return best;
}

}  // namespace avsim
