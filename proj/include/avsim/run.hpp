#pragma once

// Command orchestration shared by the CLI and the tests.

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "avsim/avs_engine.hpp"
#include "avsim/config.hpp"
#include "avsim/power_report.hpp"
#include "avsim/resilience_policy.hpp"

namespace avsim {

WorkloadStats resolved_workload(const RunConfig& cfg);
/// Delay samples for fitting (synthetic sweep or CSV); empty for source = load.
std::vector<DelaySample> delay_samples(const RunConfig& cfg);
DelaySurrogate obtain_surrogate(const RunConfig& cfg);
std::unique_ptr<AgingEvaluator> make_evaluator(const RunConfig& cfg);
PathPopulation obtain_population(const RunConfig& cfg, double critical_delay_s);
std::vector<ResilienceProfile> obtain_profiles(const RunConfig& cfg);

struct PolicyRun {
  PolicyTable table;
  AvsTrajectory baseline;
  std::map<std::string, AvsTrajectory> per_operator;
  SavingsReport report;
};

/// Builds the policy table and runs the baseline and one AVS loop per
/// operator (concurrently; results do not depend on scheduling).
PolicyRun run_policy(const RunConfig& cfg, AgingEvaluator& aging, const DelaySurrogate& model);

/// Each command validates the whole configuration, computes everything, and
/// only then writes its files. Throws on failure.
void cmd_fit_delay(const RunConfig& cfg, std::ostream& log);
void cmd_simulate(const RunConfig& cfg, std::ostream& log);
void cmd_compare(const RunConfig& cfg, std::ostream& log);
void cmd_policy(const RunConfig& cfg, std::ostream& log);
void cmd_plotdata(const RunConfig& cfg, const std::vector<std::string>& trajectories,
                  std::ostream& log);

std::string summary_line(const AvsTrajectory& traj);

}  // namespace avsim
