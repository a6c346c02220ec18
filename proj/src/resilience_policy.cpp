#include "avsim/resilience_policy.hpp"

#include <algorithm>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "avsim/csv.hpp"
#include "avsim/errors.hpp"

namespace avsim {

void PathPopulation::validate() const {
  if (delay_s.empty()) throw DomainError("path population is empty");
  if (delay_s.size() != activation.size()) {
    throw DomainError("path population needs one activation rate per path");
  }
  if (bits < 1) throw DomainError("monitored bit count must be >= 1");
  for (std::size_t i = 0; i < delay_s.size(); ++i) {
    if (!(delay_s[i] > 0.0)) throw DomainError("path delays must be > 0");
    if (!(activation[i] >= 0.0)) throw DomainError("activation rates must be >= 0");
  }
}

double PathPopulation::max_delay() const {
  validate();
  return *std::max_element(delay_s.begin(), delay_s.end());
}

double PathPopulation::max_ber() const {
  validate();
  double s = 0.0;
  for (double a : activation) s += a;
  return s / bits;
}

PathPopulation PathPopulation::synthetic(std::size_t count, double critical_delay, double sigma,
                                         double activation, int bits, std::uint64_t seed) {
  if (count == 0) throw DomainError("path population is empty");
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> z(0.0, 1.0);
  PathPopulation pop;
  pop.bits = bits;
  pop.delay_s.push_back(critical_delay);
  while (pop.delay_s.size() < count) {
    const double d = critical_delay - std::abs(sigma * z(rng));
    if (d > 0.0) pop.delay_s.push_back(d);
  }
  pop.activation.assign(count, activation);
  pop.validate();
  return pop;
}

double ber_of_scale(const PathPopulation& pop, double s, double t_clk) {
  pop.validate();
  if (std::isnan(s)) throw DomainError("scale must be a number");
  double sum = 0.0;
  for (std::size_t i = 0; i < pop.delay_s.size(); ++i) {
    if (s * pop.delay_s[i] > t_clk) sum += pop.activation[i];
  }
  return sum / pop.bits;
}

// ---------------------------------------------------------------------------

void ResilienceProfile::validate() const {
  if (ber.empty()) throw DomainError("resilience profile '" + op + "' is empty");
  if (ber.size() != loss.size()) throw DomainError("profile '" + op + "': column sizes differ");
  for (std::size_t i = 0; i < ber.size(); ++i) {
    if (!(ber[i] > 0.0 && ber[i] <= 1.0)) throw DomainError("profile '" + op + "': BER outside (0,1]");
    if (i > 0 && !(ber[i] > ber[i - 1])) {
      throw DomainError("profile '" + op + "': BER points must be strictly increasing");
    }
    if (i > 0 && loss[i] < loss[i - 1]) {
      throw DomainError("profile '" + op + "': accuracy loss must be non-decreasing");
    }
    if (!std::isfinite(loss[i])) throw DomainError("profile '" + op + "': non-finite loss");
  }
}

double ResilienceProfile::loss_at(double b) const {
  validate();
  if (b <= ber.front()) return loss.front();
  if (b >= ber.back()) return loss.back();
  const auto it = std::upper_bound(ber.begin(), ber.end(), b);
  const std::size_t i = std::size_t(it - ber.begin());
  const double x0 = std::log10(ber[i - 1]);
  const double x1 = std::log10(ber[i]);
  const double f = (std::log10(b) - x0) / (x1 - x0);
  return loss[i - 1] + f * (loss[i] - loss[i - 1]);
}

TolerableBer tolerable_ber(const ResilienceProfile& profile, double budget) {
  profile.validate();
  if (std::isnan(budget) || budget < 0.0) throw DomainError("accuracy budget must be >= 0");
  const auto& b = profile.ber;
  const auto& l = profile.loss;
  if (l.front() > budget) return {b.front(), true};
  std::size_t i = 0;
  while (i + 1 < b.size() && l[i + 1] <= budget) ++i;
  if (i + 1 == b.size()) return {b.back(), true};
  const double x0 = std::log10(b[i]);
  const double x1 = std::log10(b[i + 1]);
  const double f = (budget - l[i]) / (l[i + 1] - l[i]);
  return {std::pow(10.0, x0 + f * (x1 - x0)), false};
}

PolicyEntry delay_max_for(const PathPopulation& pop, const ResilienceProfile& profile,
                          double budget, double t_clk, double nominal_delay, double s_cap) {
  pop.validate();
  if (!(t_clk > 0.0) || !(nominal_delay > 0.0)) throw DomainError("t_clk and nominal delay must be > 0");
  if (!(s_cap >= 1.0)) throw DomainError("scale cap must be >= 1");
  const TolerableBer tol = tolerable_ber(profile, budget);

  // Breakpoints t_clk/d_p in ascending order; ber(s) jumps just after each.
  std::map<double, double> jumps;
  for (std::size_t i = 0; i < pop.delay_s.size(); ++i) {
    jumps[t_clk / pop.delay_s[i]] += pop.activation[i];
  }
  double scale = std::numeric_limits<double>::infinity();
  double cum = 0.0;
  for (const auto& [b, a] : jumps) {
    cum += a;
    if (cum / pop.bits > tol.ber) {
      scale = b;
      break;
    }
  }
  PolicyEntry e;
  e.op = profile.op;
  e.tolerable_ber = tol.ber;
  e.at_boundary = tol.at_boundary;
  if (scale > s_cap) {
    scale = s_cap;
    e.scale_capped = true;
  }
  e.scale = scale;
  // t_clk/d·d can land an ulp above t_clk; that case is the unrelaxed threshold.
  const double d = scale * nominal_delay;
  e.delay_max = d <= t_clk * (1.0 + 1e-12) ? t_clk : d;
  return e;
}

const PolicyEntry& PolicyTable::at(const std::string& op) const {
  for (const auto& e : entries) {
    if (e.op == op) return e;
  }
  throw ConfigError("policy table has no operator '" + op + "'");
}

PolicyTable build_policy(const PathPopulation& pop, const std::vector<ResilienceProfile>& profiles,
                         double budget, double t_clk, double nominal_delay, double s_cap) {
  PolicyTable table;
  for (const auto& op : kOperators) {
    const auto it = std::find_if(profiles.begin(), profiles.end(),
                                 [&](const ResilienceProfile& p) { return p.op == op; });
    if (it == profiles.end()) throw ConfigError("no resilience profile for operator '" + op + "'");
    table.entries.push_back(delay_max_for(pop, *it, budget, t_clk, nominal_delay, s_cap));
  }
  return table;
}

// ---------------------------------------------------------------------------

namespace {

// loss = L·x/(1+x), x = (BER/b50)^k, sampled every quarter decade from 1e-9
// to 1; the first sample is loss-free.
ResilienceProfile saturating_profile(std::string op, double b50, double k, double l_max = 0.6) {
  ResilienceProfile p;
  p.op = std::move(op);
  for (int q = -36; q <= 0; ++q) {
    const double b = std::pow(10.0, q / 4.0);
    const double x = std::pow(b / b50, k);
    p.ber.push_back(b);
    p.loss.push_back(q == -36 ? 0.0 : l_max * x / (1.0 + x));
  }
  return p;
}

}  // namespace

std::vector<ResilienceProfile> default_profiles() {
  return {
      saturating_profile("Q", 6.0, 1.0),     saturating_profile("K", 2.4, 1.0),
      saturating_profile("V", 8.0, 1.0),     saturating_profile("QKT", 5.0, 1.0),
      saturating_profile("SV", 7.0, 1.0),    saturating_profile("O", 6e-4, 1.0),
      saturating_profile("Gate", 9.0, 1.0),  saturating_profile("Up", 10.0, 1.0),
      saturating_profile("Down", 1.5, 1.0),
  };
}

PathPopulation load_population_csv(const std::string& path, int bits) {
  const CsvTable t = read_csv(path);
  const auto cd = t.column("delay_ns");
  const auto ca = t.column("activation_rate");
  t.column("path_id");
  PathPopulation pop;
  pop.bits = bits;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    pop.delay_s.push_back(t.number(r, cd) * 1e-9);
    pop.activation.push_back(t.number(r, ca));
  }
  pop.validate();
  return pop;
}

std::string population_csv(const PathPopulation& pop) {
  std::ostringstream os;
  os << "path_id,delay_ns,activation_rate\n";
  for (std::size_t i = 0; i < pop.delay_s.size(); ++i) {
    os << i << "," << fmt_double(pop.delay_s[i] * 1e9) << "," << fmt_double(pop.activation[i]) << "\n";
  }
  return os.str();
}

std::vector<ResilienceProfile> load_profiles_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const auto co = t.column("operator");
  const auto cb = t.column("ber");
  const auto cl = t.column("accuracy_loss");
  std::vector<ResilienceProfile> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& op = t.rows[r][co];
    auto it = std::find_if(out.begin(), out.end(), [&](const ResilienceProfile& p) { return p.op == op; });
    if (it == out.end()) {
      out.push_back({op, {}, {}});
      it = out.end() - 1;
    }
    it->ber.push_back(t.number(r, cb));
    it->loss.push_back(t.number(r, cl));
  }
  for (const auto& p : out) p.validate();
  return out;
}

std::string profiles_csv(const std::vector<ResilienceProfile>& profiles) {
  std::ostringstream os;
  os << "operator,ber,accuracy_loss\n";
  for (const auto& p : profiles) {
    for (std::size_t i = 0; i < p.ber.size(); ++i) {
      os << p.op << "," << fmt_double(p.ber[i]) << "," << fmt_double(p.loss[i]) << "\n";
    }
  }
  return os.str();
}

std::string policy_csv(const PolicyTable& table) {
  std::ostringstream os;
  os << "operator,tolerable_ber,scale,delay_max_ns\n";
  for (const auto& e : table.entries) {
    os << e.op << "," << fmt_double(e.tolerable_ber) << "," << fmt_double(e.scale) << ","
       << fmt_double(e.delay_max * 1e9) << "\n";
  }
  return os.str();
}

}  // namespace avsim
