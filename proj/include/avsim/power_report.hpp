#pragma once

#include <map>
#include <string>
#include <vector>

#include "avsim/avs_engine.hpp"

namespace avsim {

struct PowerModel {
  double p0 = 0.85;     // W at v_ref
  double v_ref = 0.90;  // V
  double exponent = 2.0;
  double leakage_fraction = 0.0;  // extra P0·f·(V/v_ref)

  void validate() const;
};

/// Time-weighted RMS of V_DD over the epochs.
double effective_voltage(const std::vector<Epoch>& epochs);
double effective_voltage(const AvsTrajectory& traj);

double lifetime_power(const PowerModel& pm, double v_eff);

struct ComponentRow {
  std::string component;
  double v_final = 0.0;
  double dvth_p = 0.0;  // V
  double dvth_n = 0.0;  // V
  double v_eff = 0.0;
  double p_avg = 0.0;   // W
  double saving = 0.0;  // fraction, 1 − P/P_baseline
};

struct SavingsReport {
  ComponentRow baseline;
  std::vector<ComponentRow> rows;  // in kOperators order
  double average_power = 0.0;
  double average_saving = 0.0;
};

/// Needs a trajectory for each of the nine operators.
SavingsReport savings_report(const std::map<std::string, AvsTrajectory>& per_operator,
                             const AvsTrajectory& baseline, const PowerModel& pm);

std::string savings_csv(const SavingsReport& rep);
std::string savings_text(const SavingsReport& rep);

}  // namespace avsim
