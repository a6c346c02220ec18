#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "avsim/config.hpp"
#include "avsim/errors.hpp"
#include "avsim/run.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string horizon;
  double budget = -1.0;
  bool dump_defaults = false;
  std::vector<std::string> files;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "INI run configuration");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--horizon", o.horizon, "lifetime horizon, e.g. 10y, 90d, 3600s");
  cmd->add_option("--budget", o.budget, "accuracy-loss budget as a fraction");
  cmd->add_flag("--dump-defaults", o.dump_defaults, "print the default configuration and exit");
}

avsim::RunConfig resolve(const Options& o) {
  avsim::RunConfig cfg = o.config.empty() ? avsim::RunConfig{} : avsim::load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.horizon.empty()) cfg.avs.horizon = avsim::parse_duration(o.horizon);
  if (o.budget >= 0.0) cfg.policy.budget = o.budget;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aging-aware adaptive voltage scaling simulator"};
  app.require_subcommand(1);
  Options o;
  auto* fit = app.add_subcommand("fit-delay", "fit the delay surrogate and report its RMSE");
  auto* sim = app.add_subcommand("simulate", "run the AVS loop over the lifetime");
  auto* cmp = app.add_subcommand("compare", "compare constant-voltage and AVS aging");
  auto* pol = app.add_subcommand("policy", "derive per-operator delay limits and report power");
  auto* plot = app.add_subcommand("plotdata", "merge trajectory CSVs into long format");
  for (auto* c : {fit, sim, cmp, pol, plot}) add_common(c, o);
  plot->add_option("files", o.files, "trajectory CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (o.dump_defaults) {
      std::cout << avsim::dump_defaults();
      return 0;
    }
    const avsim::RunConfig cfg = resolve(o);
    if (fit->parsed()) avsim::cmd_fit_delay(cfg, std::cout);
    if (sim->parsed()) avsim::cmd_simulate(cfg, std::cout);
    if (cmp->parsed()) avsim::cmd_compare(cfg, std::cout);
    if (pol->parsed()) avsim::cmd_policy(cfg, std::cout);
    if (plot->parsed()) avsim::cmd_plotdata(cfg, o.files, std::cout);
  } catch (const avsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
