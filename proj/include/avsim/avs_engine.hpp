#pragma once

// Closed-loop lifetime simulation with adaptive voltage scaling, and the
// four-scenario aging comparison.

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "avsim/aging_models.hpp"
#include "avsim/delay_surrogate.hpp"
#include "avsim/waveform.hpp"

namespace avsim {

struct AvsConfig {
  double v_init = 0.90;             // V
  double v_step = 0.010;            // V
  double v_max_cap = 1.10;          // V
  double t_clk = 1.6e-9;            // s
  double delay_threshold = 1.6e-9;  // s
  double horizon = kDefaultHorizon; // s
  double checkpoints_per_decade = 50.0;
  double first_checkpoint = 1.0;    // s
  double locate_tolerance = 3600.0; // s
  int branch_factor = 10;
  int transition_intervals = 1000;

  void validate() const;
};

struct Checkpoint {
  double t = 0.0;        // s
  double v_dd = 0.0;     // V
  double delay_ns = 0.0;
  double dvth_p = 0.0;   // V, BTI + HCI
  double dvth_n = 0.0;   // V
  double pmos_bti = 0.0; // V
  double pmos_hci = 0.0; // V
};

struct StepEvent {
  double t = 0.0;
  double v_old = 0.0;
  double v_new = 0.0;
  double delay_before_ns = 0.0;
  double delay_after_ns = 0.0;
};

struct ViolationEvent {
  double t = 0.0;
  double v_dd = 0.0;
  double delay_ns = 0.0;
};

struct Epoch {
  double v_dd = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct AvsTrajectory {
  std::vector<Checkpoint> checkpoints;
  std::vector<StepEvent> steps;
  std::vector<ViolationEvent> violations;
  std::vector<Epoch> epochs;
  bool capped = false;
  std::size_t out_of_domain_evals = 0;
  double v_init = 0.0;
  double v_step = 0.0;

  const Checkpoint& final_state() const { return checkpoints.back(); }
  double v_final() const { return checkpoints.back().v_dd; }
};

/// Per-voltage aging responses (BTI extrapolation tables and HCI γ factors),
/// computed on first use and cached. Safe to share between concurrent runs.
class AgingEvaluator {
 public:
  AgingEvaluator(AgingModel model, WorkloadStats stats, double horizon,
                 ExtrapolationOptions opts = {}, int transition_intervals = 1000,
                 std::optional<TransitionWaveform> transition_shape = std::nullopt);

  const std::vector<BtiResponse>& bti(double v_dd);
  double gamma_pmos(double v_dd) { return gammas(v_dd).first; }
  double gamma_nmos(double v_dd) { return gammas(v_dd).second; }
  std::pair<double, double> gammas(double v_dd);
  const AgingModel& model() const { return model_; }
  const WorkloadStats& stats() const { return stats_; }
  double horizon() const { return horizon_; }

 private:
  TransitionWaveform transition_at(double v_dd) const;
  static long long key(double v) { return std::llround(v * 1e9); }

  AgingModel model_;
  WorkloadStats stats_;
  double horizon_;
  ExtrapolationOptions opts_;
  int intervals_;
  std::optional<TransitionWaveform> shape_;
  std::mutex mu_;
  std::map<long long, std::vector<BtiResponse>> bti_;
  std::map<long long, std::pair<double, double>> gamma_;
};

/// Aging of one device pair at a point in time.
struct AgingSnapshot {
  std::vector<double> bti;  // per species, V
  double pmos_hci = 0.0;
  double nmos_hci = 0.0;

  double pmos_bti() const;
  double pmos_total() const { return pmos_bti() + pmos_hci; }
};

/// Returns t* in [t_lo, t_hi) with delay(t*) <= threshold < delay(t* + tol),
/// by bisection. Throws InternalError when the bracket does not straddle the
/// threshold.
double locate_violation(const std::function<double(double)>& delay_ns_at, double threshold_ns,
                        double t_lo, double t_hi, double tol = 3600.0);

AvsTrajectory simulate(const AvsConfig& cfg, AgingEvaluator& aging, const DelaySurrogate& model);
AvsTrajectory simulate(const AvsConfig& cfg, const AgingParams& params, const WorkloadStats& stats,
                       const DelaySurrogate& model);

/// Aging after `t` seconds at constant v_dd, with or without BTI recovery.
AgingSnapshot constant_voltage_aging(AgingEvaluator& aging, double v_dd, double t, bool recovery);

struct ScenarioRow {
  std::string name;
  double v_dd = 0.0;  // constant voltage, or final voltage for the AVS row
  double pmos_hci = 0.0;
  double pmos_bti = 0.0;
  double pmos_total() const { return pmos_hci + pmos_bti; }
  double nmos = 0.0;
};

struct ScenarioReport {
  std::vector<ScenarioRow> rows;  // a, b, c, d
  AvsTrajectory avs;

  /// 1 − (d)/(c) for PMOS total and NMOS.
  double pmos_reduction() const;
  double nmos_reduction() const;
};

ScenarioReport compare_scenarios(const AvsConfig& cfg, AgingEvaluator& aging,
                                 const DelaySurrogate& model);

std::string trajectory_csv(const AvsTrajectory& traj);
std::string events_csv(const AvsTrajectory& traj);
std::string scenario_csv(const ScenarioReport& rep);
std::string scenario_text(const ScenarioReport& rep);

}  // namespace avsim
