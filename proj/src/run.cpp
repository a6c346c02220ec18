#include "avsim/run.hpp"

#include <cstdio>
#include <filesystem>
#include <future>
#include <sstream>

#include "avsim/csv.hpp"
#include "avsim/errors.hpp"

namespace avsim {

namespace fs = std::filesystem;

WorkloadStats resolved_workload(const RunConfig& cfg) {
  if (cfg.trace_csv.empty()) return cfg.workload;
  const CsvTable t = read_csv(cfg.trace_csv);
  t.column("cell");
  const auto cd = t.column("duty_factor");
  const auto ct = t.column("toggle_rate");
  std::vector<double> duty, toggle;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    duty.push_back(t.number(r, cd));
    toggle.push_back(t.number(r, ct));
  }
  return average_cell_activity(duty, toggle, cfg.workload);
}

std::vector<DelaySample> delay_samples(const RunConfig& cfg) {
  switch (cfg.delay.source) {
    case DelaySource::Synthetic: return cfg.delay.synthetic.sweep();
    case DelaySource::Csv: return load_sweep_csv(cfg.delay.sweep_csv);
    case DelaySource::Load: return {};
  }
  return {};
}

DelaySurrogate obtain_surrogate(const RunConfig& cfg) {
  if (cfg.delay.source == DelaySource::Load) return load_surrogate(cfg.delay.model_file);
  return fit_delay(delay_samples(cfg), cfg.delay.degree, cfg.delay.basis);
}

std::unique_ptr<AgingEvaluator> make_evaluator(const RunConfig& cfg) {
  std::optional<TransitionWaveform> shape;
  if (!cfg.transition_csv.empty()) shape = load_transition_csv(cfg.transition_csv);
  return std::make_unique<AgingEvaluator>(
      AgingModel::from_params(cfg.aging), resolved_workload(cfg), cfg.avs.horizon,
      ExtrapolationOptions{cfg.avs.branch_factor, cfg.avs.checkpoints_per_decade,
                           cfg.avs.first_checkpoint},
      cfg.avs.transition_intervals, shape);
}

PathPopulation obtain_population(const RunConfig& cfg, double critical_delay_s) {
  if (!cfg.policy.population_csv.empty()) {
    return load_population_csv(cfg.policy.population_csv, cfg.policy.bits);
  }
  return PathPopulation::synthetic(std::size_t(cfg.policy.path_count), critical_delay_s,
                                   cfg.policy.path_sigma, resolved_workload(cfg).toggle_rate,
                                   cfg.policy.bits, cfg.policy.seed);
}

std::vector<ResilienceProfile> obtain_profiles(const RunConfig& cfg) {
  if (!cfg.policy.profiles_csv.empty()) return load_profiles_csv(cfg.policy.profiles_csv);
  return default_profiles();
}

PolicyRun run_policy(const RunConfig& cfg, AgingEvaluator& aging, const DelaySurrogate& model) {
  PolicyRun out;
  const double nominal = model.eval(0.0, 0.0, cfg.avs.v_init) * 1e-9;
  const PathPopulation pop = obtain_population(cfg, nominal);
  out.table = build_policy(pop, obtain_profiles(cfg), cfg.policy.budget, cfg.avs.t_clk, nominal,
                           cfg.policy.s_cap);

  auto run_with = [&](double threshold) {
    AvsConfig a = cfg.avs;
    a.delay_threshold = threshold;
    return simulate(a, aging, model);
  };
  // Warm the shared cache for the voltages every run starts with.
  aging.bti(cfg.avs.v_init);
  aging.gammas(cfg.avs.v_init);

  auto base = std::async(std::launch::async, run_with, cfg.avs.delay_threshold);
  std::vector<std::future<AvsTrajectory>> jobs;
  for (const auto& e : out.table.entries) {
    jobs.push_back(std::async(std::launch::async, run_with, e.delay_max));
  }
  out.baseline = base.get();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.per_operator[out.table.entries[i].op] = jobs[i].get();
  }
  out.report = savings_report(out.per_operator, out.baseline, cfg.power);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string header(const std::string& hash) { return "# config_hash=" + hash + "\n"; }

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

void write_all(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& files,
               std::ostream& log) {
  const std::string h = header(config_hash(cfg));
  for (const auto& [name, body] : files) {
    const std::string p = path_in(cfg, name);
    write_file_atomic(p, h + body);
    log << "wrote " << p << "\n";
  }
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string summary_line(const AvsTrajectory& traj) {
  const auto& f = traj.final_state();
  std::ostringstream os;
  os << "V_final=" << fixed(f.v_dd, 3) << " V steps=" << traj.steps.size()
     << " dVth_p=" << fixed(f.dvth_p * 1e3, 1) << " mV dVth_n=" << fixed(f.dvth_n * 1e3, 1)
     << " mV V_eff=" << fixed(effective_voltage(traj), 4) << " V"
     << (traj.capped ? " CAPPED" : "")
     << (traj.out_of_domain_evals ? " (warning: surrogate evaluated outside its fit domain)" : "");
  return os.str();
}

void cmd_fit_delay(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.delay.source == DelaySource::Load) {
    throw ConfigError("fit-delay needs [delay] source = synthetic or csv");
  }
  const auto samples = delay_samples(cfg);
  const DelaySurrogate s = fit_delay(samples, cfg.delay.degree, cfg.delay.basis);
  std::ostringstream rep;
  rep << "samples " << samples.size() << "\n";
  rep << "degree " << s.delay.degree() << "\n";
  rep << "coefficients " << s.delay.coefficients().size() << "\n";
  rep << "rmse_ns " << fmt_double(s.rmse_ns) << "\n";
  if (s.transition) rep << "transition_rmse_ns " << fmt_double(s.transition_rmse_ns) << "\n";
  rep << "nominal_delay_ns " << fmt_double(s.eval(0.0, 0.0, cfg.avs.v_init)) << "\n";
  std::vector<std::pair<std::string, std::string>> files{{"delay_model.txt", serialize(s)},
                                                         {"fit_report.txt", rep.str()}};
  if (cfg.delay.source == DelaySource::Synthetic) files.emplace_back("sweep.csv", sweep_csv(samples));
  write_all(cfg, files, log);
  log << "fit RMSE " << fmt_double(s.rmse_ns) << " ns over " << samples.size() << " samples ("
      << s.delay.coefficients().size() << " coefficients)\n";
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const DelaySurrogate model = obtain_surrogate(cfg);
  auto aging = make_evaluator(cfg);
  const AvsTrajectory traj = simulate(cfg.avs, *aging, model);
  const std::string line = summary_line(traj);
  write_all(cfg,
            {{"trajectory.csv", trajectory_csv(traj)},
             {"events.csv", events_csv(traj)},
             {"summary.txt", line + "\n"}},
            log);
  log << line << "\n";
}

void cmd_compare(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const DelaySurrogate model = obtain_surrogate(cfg);
  auto aging = make_evaluator(cfg);
  const ScenarioReport rep = compare_scenarios(cfg.avs, *aging, model);
  write_all(cfg,
            {{"scenarios.csv", scenario_csv(rep)},
             {"scenarios.txt", scenario_text(rep)},
             {"trajectory.csv", trajectory_csv(rep.avs)},
             {"events.csv", events_csv(rep.avs)}},
            log);
  log << scenario_text(rep);
}

void cmd_policy(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const DelaySurrogate model = obtain_surrogate(cfg);
  auto aging = make_evaluator(cfg);
  const PolicyRun run = run_policy(cfg, *aging, model);
  std::vector<std::pair<std::string, std::string>> files{
      {"policy.csv", policy_csv(run.table)},
      {"savings.csv", savings_csv(run.report)},
      {"savings.txt", savings_text(run.report)},
      {"trajectory_baseline.csv", trajectory_csv(run.baseline)}};
  for (const auto& [op, traj] : run.per_operator) {
    files.emplace_back("trajectory_" + op + ".csv", trajectory_csv(traj));
  }
  write_all(cfg, files, log);
  log << savings_text(run.report);
  char line[80];
  std::snprintf(line, sizeof line, "average power saving %.1f%%\n", 100.0 * run.report.average_saving);
  log << line;
}

void cmd_plotdata(const RunConfig& cfg, const std::vector<std::string>& trajectories,
                  std::ostream& log) {
  cfg.validate();
  if (trajectories.empty()) throw ConfigError("plotdata needs at least one trajectory CSV");
  std::vector<std::pair<std::string, CsvTable>> inputs;
  for (const auto& p : trajectories) {
    if (!fs::is_regular_file(p)) throw ConfigError("trajectory file '" + p + "' does not exist");
    inputs.emplace_back(fs::path(p).stem().string(), read_csv(p));
  }
  std::ostringstream os;
  os << "series,t_s,value\n";
  for (const auto& [stem, t] : inputs) {
    const auto ct = t.column("t_s");
    for (const char* col : {"v_dd_v", "delay_ns", "dvth_p_mv", "dvth_n_mv"}) {
      const auto c = t.column(col);
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << stem << ":" << col << "," << t.rows[r][ct] << "," << t.rows[r][c] << "\n";
      }
    }
  }
  write_all(cfg, {{"plotdata.csv", os.str()}}, log);
}

}  // namespace avsim
