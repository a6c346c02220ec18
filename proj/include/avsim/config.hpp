#pragma once

// Run configuration: an INI-style file with one section per concern. Every
// key has an embedded default, so an empty file is a complete description of
// the reference experiment.

#include <optional>
#include <string>

#include "avsim/aging_models.hpp"
#include "avsim/avs_engine.hpp"
#include "avsim/delay_surrogate.hpp"
#include "avsim/power_report.hpp"
#include "avsim/waveform.hpp"

namespace avsim {

enum class DelaySource { Synthetic, Csv, Load };

struct DelayConfig {
  DelaySource source = DelaySource::Synthetic;
  std::string sweep_csv;   // source = csv
  std::string model_file;  // source = load
  int degree = 6;
  PolyBasis basis = PolyBasis::TotalDegree;
  SyntheticDelayConfig synthetic;
};

struct PolicyConfig {
  double budget = 0.005;
  double s_cap = 1.5;
  int bits = 32;
  std::string population_csv;  // empty: synthetic population
  std::string profiles_csv;    // empty: built-in profiles
  int path_count = 100;
  double path_sigma = 15e-12;  // s
  std::uint64_t seed = 20240601;
};

struct RunConfig {
  AgingParams aging = AgingParams::defaults();
  WorkloadStats workload;
  std::string trace_csv;       // optional per-cell activity, overrides duty/toggle
  std::string transition_csv;  // optional sampled transition waveform
  DelayConfig delay;
  AvsConfig avs;
  PolicyConfig policy;
  PowerModel power;
  std::string output_dir = "avsim_out";

  /// Throws ConfigError on any invalid value or missing referenced file.
  void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
/// Complete, canonical INI text for `cfg` (all keys, 17-digit numbers).
std::string dump_config(const RunConfig& cfg);
std::string dump_defaults();
/// SHA-256 (hex) of the canonical dump, ignoring the output directory.
std::string config_hash(const RunConfig& cfg);

/// Parses "30", "1s", "90d", "10y" (1 y = 3.1536e7 s).
double parse_duration(const std::string& text);

}  // namespace avsim
