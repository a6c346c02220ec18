#pragma once

// Trivariate polynomial surrogate for critical-path delay (and transition
// time) as a function of (ΔV_th,p, ΔV_th,n, V_DD).

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace avsim {

struct DelaySample {
  double dvth_p = 0.0;  // V
  double dvth_n = 0.0;  // V
  double v_dd = 0.0;    // V
  double delay_ns = 0.0;
  std::optional<double> transition_ns;
};

struct FitBox {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};

  bool contains(double p, double n, double v) const;
};

enum class PolyBasis {
  TotalDegree,  // a + b + c <= degree
  Tensor,       // max(a, b, c) <= degree
};

/// Polynomial in the box-normalized variables u = (2x - lo - hi)/(hi - lo).
class Polynomial3 {
 public:
  Polynomial3() = default;
  Polynomial3(PolyBasis basis, int degree, FitBox box);

  static std::size_t coefficient_count(PolyBasis basis, int degree);

  double operator()(double p, double n, double v) const;
  /// Coefficients of the same polynomial in the raw variables, keyed like
  /// exponents().
  std::vector<double> raw_coefficients() const;

  PolyBasis basis() const { return basis_; }
  int degree() const { return degree_; }
  const FitBox& box() const { return box_; }
  const std::vector<std::array<int, 3>>& exponents() const { return exps_; }
  const std::vector<double>& coefficients() const { return coefs_; }
  void set_coefficients(std::vector<double> c);

 private:
  PolyBasis basis_ = PolyBasis::TotalDegree;
  int degree_ = 0;
  FitBox box_{};
  std::vector<std::array<int, 3>> exps_;
  std::vector<double> coefs_;
  std::vector<double> dense_;  // (degree+1)^3 layout for nested Horner evaluation
};

/// Least-squares fit over `points` (x = {p, n, v}) of `values`.
Polynomial3 fit_polynomial(const std::vector<std::array<double, 3>>& points,
                           const std::vector<double>& values, int degree,
                           PolyBasis basis = PolyBasis::TotalDegree);

struct DelayEval {
  double delay_ns = 0.0;
  bool out_of_domain = false;
};

struct DelaySurrogate {
  Polynomial3 delay;
  double rmse_ns = 0.0;
  std::optional<Polynomial3> transition;
  double transition_rmse_ns = 0.0;

  double eval(double dvth_p, double dvth_n, double v_dd) const { return delay(dvth_p, dvth_n, v_dd); }
  DelayEval evaluate(double dvth_p, double dvth_n, double v_dd) const;
  std::optional<double> transition_ns(double dvth_p, double dvth_n, double v_dd) const;
};

DelaySurrogate fit_delay(const std::vector<DelaySample>& samples, int degree,
                         PolyBasis basis = PolyBasis::TotalDegree);

/// Root-mean-square residual of `poly` over the samples' delay column.
double residual_rms(const Polynomial3& poly, const std::vector<DelaySample>& samples);

std::string serialize(const DelaySurrogate& s);
DelaySurrogate deserialize_surrogate(const std::string& text);
void save_surrogate(const DelaySurrogate& s, const std::string& path, const std::string& header = {});
DelaySurrogate load_surrogate(const std::string& path);

/// Reads a sweep CSV; samples repeated at the same (p, n, v) point (one per
/// path) are averaged into one.
std::vector<DelaySample> load_sweep_csv(const std::string& path);
std::string sweep_csv(const std::vector<DelaySample>& samples);
std::vector<DelaySample> average_duplicate_points(const std::vector<DelaySample>& samples);

// ---------------------------------------------------------------------------

struct SweepAxis {
  double lo = 0.0;
  double hi = 0.0;
  int points = 2;
};

/// Smooth stand-in for circuit-level delay sweeps:
/// delay = c·V/(V − V_th,eff)^α, V_th,eff = vth0 + w_p·ΔV_th,p + w_n·ΔV_th,n,
/// with c set so the nominal point reproduces nominal_delay_ns.
struct SyntheticDelayConfig {
  double nominal_delay_ns = 1.542;
  double v_nominal = 0.90;
  double vth0 = -0.0663111;
  double alpha = 1.44565;
  double w_p = 0.484128;
  double w_n = 0.0764083;
  double nominal_transition_ns = 0.02;
  SweepAxis dvth_p{0.0, 0.16, 17};
  SweepAxis dvth_n{0.0, 0.14, 15};
  SweepAxis v_dd{0.86, 1.12, 27};

  void validate() const;
  double delay_ns(double dvth_p, double dvth_n, double v_dd) const;
  double transition_ns(double dvth_p, double dvth_n, double v_dd) const;
  std::vector<DelaySample> sweep() const;
  FitBox box() const;
};

}  // namespace avsim
