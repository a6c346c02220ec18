#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "avsim/calibration.hpp"
#include "avsim/config.hpp"
#include "avsim/errors.hpp"
#include "avsim/power_report.hpp"
#include "avsim/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tune the aging fixture against the reference lifetime scenarios"};
  std::string config;
  int sweeps = 10;
  bool report_only = false;
  bool include_delay = false;
  app.add_option("--config", config, "INI run configuration providing the starting point");
  app.add_option("--sweeps", sweeps, "coordinate-search sweeps");
  app.add_flag("--report", report_only, "only evaluate the starting point");
  app.add_flag("--delay", include_delay, "also tune the synthetic delay generator");
  CLI11_PARSE(app, argc, argv);

  try {
    const avsim::RunConfig cfg = config.empty() ? avsim::RunConfig{} : avsim::load_config(config);
    cfg.validate();
    const auto targets = avsim::reference_targets();
    avsim::RunConfig out = cfg;
    if (!report_only) out = avsim::calibrate(cfg, targets, sweeps, include_delay, std::cerr).config;

    avsim::ScenarioReport rep;
    const double e = avsim::evaluate_config(out, targets, &rep);
    std::cout << avsim::scenario_text(rep);
    std::printf("objective %.6g  worst cell error (incl. BTI/HCI parts) %.4f  steps %zu  V_eff %.4f\n", e,
                avsim::max_relative_error(rep, targets), rep.avs.steps.size(),
                avsim::effective_voltage(rep.avs));
    std::cout << avsim::dump_config(out);
  } catch (const avsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
