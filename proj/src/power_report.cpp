#include "avsim/power_report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "avsim/errors.hpp"
#include "avsim/resilience_policy.hpp"

namespace avsim {

void PowerModel::validate() const {
  if (!(p0 > 0.0)) throw ConfigError("power: p0 must be > 0");
  if (!(v_ref > 0.0)) throw ConfigError("power: v_ref must be > 0");
  if (!(exponent > 0.0)) throw ConfigError("power: exponent must be > 0");
  if (!(leakage_fraction >= 0.0)) throw ConfigError("power: leakage_fraction must be >= 0");
}

double effective_voltage(const std::vector<Epoch>& epochs) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& e : epochs) {
    const double dt = e.t_end - e.t_begin;
    if (dt < 0.0) throw DomainError("epoch ends before it begins");
    num += e.v_dd * e.v_dd * dt;
    den += dt;
  }
  if (!(den > 0.0)) throw DomainError("trajectory has zero duration");
  return std::sqrt(num / den);
}

double effective_voltage(const AvsTrajectory& traj) { return effective_voltage(traj.epochs); }

double lifetime_power(const PowerModel& pm, double v_eff) {
  pm.validate();
  if (!(v_eff > 0.0)) throw DomainError("effective voltage must be > 0");
  const double r = v_eff / pm.v_ref;
  return pm.p0 * (std::pow(r, pm.exponent) + pm.leakage_fraction * r);
}

namespace {

ComponentRow row_for(const std::string& name, const AvsTrajectory& t, const PowerModel& pm) {
  ComponentRow r;
  r.component = name;
  r.v_final = t.v_final();
  r.dvth_p = t.final_state().dvth_p;
  r.dvth_n = t.final_state().dvth_n;
  r.v_eff = effective_voltage(t);
  r.p_avg = lifetime_power(pm, r.v_eff);
  return r;
}

}  // namespace

SavingsReport savings_report(const std::map<std::string, AvsTrajectory>& per_operator,
                             const AvsTrajectory& baseline, const PowerModel& pm) {
  SavingsReport rep;
  rep.baseline = row_for("None", baseline, pm);
  double p_sum = 0.0;
  double s_sum = 0.0;
  for (const auto& op : kOperators) {
    const auto it = per_operator.find(op);
    if (it == per_operator.end()) throw ConfigError("savings report: missing operator '" + op + "'");
    ComponentRow r = row_for(op, it->second, pm);
    r.saving = 1.0 - r.p_avg / rep.baseline.p_avg;
    p_sum += r.p_avg;
    s_sum += r.saving;
    rep.rows.push_back(r);
  }
  rep.average_power = p_sum / double(rep.rows.size());
  rep.average_saving = s_sum / double(rep.rows.size());
  return rep;
}

std::string savings_csv(const SavingsReport& rep) {
  std::ostringstream os;
  os << "component,v_final_v,dvth_p_mv,dvth_n_mv,v_eff_v,p_avg_w,saving_pct\n";
  char line[200];
  auto emit = [&](const ComponentRow& r, bool with_saving) {
    std::snprintf(line, sizeof line, "%s,%.3f,%.3f,%.3f,%.4f,%.4f,", r.component.c_str(), r.v_final,
                  r.dvth_p * 1e3, r.dvth_n * 1e3, r.v_eff, r.p_avg);
    os << line;
    if (with_saving) {
      std::snprintf(line, sizeof line, "%.3f", 100.0 * r.saving);
      os << line;
    }
    os << "\n";
  };
  emit(rep.baseline, false);
  for (const auto& r : rep.rows) emit(r, true);
  std::snprintf(line, sizeof line, "Avg,,,,,%.4f,%.3f\n", rep.average_power, 100.0 * rep.average_saving);
  os << line;
  return os.str();
}

std::string savings_text(const SavingsReport& rep) {
  std::ostringstream os;
  char line[200];
  std::snprintf(line, sizeof line, "%-9s %8s %10s %10s %7s %7s %8s\n", "component", "V_final",
                "dVth_p mV", "dVth_n mV", "V_eff", "P_avg", "saving");
  os << line;
  auto emit = [&](const ComponentRow& r, bool with_saving) {
    std::snprintf(line, sizeof line, "%-9s %8.2f %10.1f %10.1f %7.3f %7.3f ", r.component.c_str(),
                  r.v_final, r.dvth_p * 1e3, r.dvth_n * 1e3, r.v_eff, r.p_avg);
    os << line;
    if (with_saving) {
      std::snprintf(line, sizeof line, "%7.1f%%", 100.0 * r.saving);
      os << line;
    } else {
      os << "       /";
    }
    os << "\n";
  };
  emit(rep.baseline, false);
  for (const auto& r : rep.rows) emit(r, true);
  std::snprintf(line, sizeof line, "%-9s %8s %10s %10s %7s %7.3f %7.1f%%\n", "Avg", "/", "/", "/",
                "/", rep.average_power, 100.0 * rep.average_saving);
  os << line;
  return os.str();
}

}  // namespace avsim
