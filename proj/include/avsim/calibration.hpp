#pragma once

// Fitting the aging fixture to reference lifetime scenarios.

#include <ostream>
#include <string>
#include <vector>

#include "avsim/avs_engine.hpp"
#include "avsim/config.hpp"

namespace avsim {

/// Reference ΔV_th values for one scenario row (mV).
struct ScenarioTarget {
  std::string scenario;
  double pmos_total = 0.0;
  double nmos = 0.0;
  double pmos_bti = 0.0;
  double pmos_hci = 0.0;
};

struct CalibrationTargets {
  std::vector<ScenarioTarget> rows;  // matched to ScenarioReport rows by name
  double pmos_reduction = 0.0;
  double nmos_reduction = 0.0;
  double v_final = 0.0;
  double v_eff = 0.0;  // time-weighted RMS supply of the AVS run
};

/// The reference lifetime scenarios the shipped fixture is tuned to.
CalibrationTargets reference_targets();

/// Sum of squared relative errors, a steep extra penalty on total shifts more
/// than 4% off, plus penalties on the reductions, the
/// final voltage and the effective voltage.
double calibration_objective(const ScenarioReport& rep, const CalibrationTargets& targets);

/// Worst relative error over every scenario cell.
double max_relative_error(const ScenarioReport& rep, const CalibrationTargets& targets);

struct CalibrationResult {
  RunConfig config;
  double objective = 0.0;
  int evaluations = 0;
};

/// Fits the delay surrogate and runs the scenario comparison for `cfg`.
/// Returns +inf when the configuration cannot be evaluated.
double evaluate_config(const RunConfig& cfg, const CalibrationTargets& targets,
                       ScenarioReport* report = nullptr);

/// Coordinate search over the aging prefactors (log scale), voltage
/// accelerations and time exponents, and over the synthetic delay generator
/// when `include_delay` is set. Steps halve after a sweep without improvement.
CalibrationResult calibrate(const RunConfig& cfg, const CalibrationTargets& targets, int sweeps,
                            bool include_delay, std::ostream& log);

}  // namespace avsim
