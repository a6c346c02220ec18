#pragma once

// Error-resilience-driven delay thresholds: path population → BER as a
// function of a uniform delay scale, per-operator accuracy profiles → the
// tolerable BER, and the resulting per-operator delay_max.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace avsim {

inline const std::array<std::string, 9> kOperators = {"Q",  "K",    "V",  "QKT", "SV",
                                                      "O",  "Gate", "Up", "Down"};

struct PathPopulation {
  std::vector<double> delay_s;     // nominal path delays
  std::vector<double> activation;  // errors per cycle contributed when violating
  int bits = 32;                   // monitored output bits

  void validate() const;
  double max_delay() const;
  /// Σ a_p / B, the BER when every path violates.
  double max_ber() const;

  /// Deterministic fixture: path 0 at `critical_delay`, the remaining paths
  /// at critical_delay − |σ·z| (half-normal below the critical delay).
  static PathPopulation synthetic(std::size_t count = 100, double critical_delay = 1.542e-9,
                                  double sigma = 15e-12, double activation = 0.0075,
                                  int bits = 32, std::uint64_t seed = 20240601);
};

/// (1/B)·Σ a_p·[s·d_p > t_clk].
double ber_of_scale(const PathPopulation& pop, double s, double t_clk);

struct ResilienceProfile {
  std::string op;
  std::vector<double> ber;
  std::vector<double> loss;  // accuracy-loss fraction

  void validate() const;
  /// Loss at `b`, piecewise linear in log10(BER), clamped at the ends.
  double loss_at(double b) const;
};

struct TolerableBer {
  double ber = 0.0;
  bool at_boundary = false;  // budget outside the sampled loss range
};

TolerableBer tolerable_ber(const ResilienceProfile& profile, double budget);

struct PolicyEntry {
  std::string op;
  double tolerable_ber = 0.0;
  bool at_boundary = false;
  double scale = 1.0;      // s*
  bool scale_capped = false;
  double delay_max = 0.0;  // s
};

PolicyEntry delay_max_for(const PathPopulation& pop, const ResilienceProfile& profile,
                          double budget, double t_clk, double nominal_delay, double s_cap = 1.5);

struct PolicyTable {
  std::vector<PolicyEntry> entries;  // in kOperators order

  const PolicyEntry& at(const std::string& op) const;
};

/// One population shared by every operator.
PolicyTable build_policy(const PathPopulation& pop, const std::vector<ResilienceProfile>& profiles,
                         double budget, double t_clk, double nominal_delay, double s_cap = 1.5);

/// Illustrative default profiles for the nine operators: saturating loss
/// curves whose half-loss BER ranges from 6e-4 (O) to 10 (Up).
std::vector<ResilienceProfile> default_profiles();

PathPopulation load_population_csv(const std::string& path, int bits = 32);
std::string population_csv(const PathPopulation& pop);
std::vector<ResilienceProfile> load_profiles_csv(const std::string& path);
std::string profiles_csv(const std::vector<ResilienceProfile>& profiles);
std::string policy_csv(const PolicyTable& table);

}  // namespace avsim
