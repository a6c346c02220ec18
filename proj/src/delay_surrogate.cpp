#include "avsim/delay_surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "avsim/csv.hpp"
#include "avsim/errors.hpp"

namespace avsim {

namespace {

const char* basis_name(PolyBasis b) { return b == PolyBasis::Tensor ? "tensor" : "total"; }

PolyBasis parse_basis(const std::string& s) {
  if (s == "total") return PolyBasis::TotalDegree;
  if (s == "tensor") return PolyBasis::Tensor;
  throw ConfigError("unknown polynomial basis '" + s + "' (expected total or tensor)");
}

std::string monomial_name(const std::array<int, 3>& e) {
  static const char* vars[3] = {"dvth_p", "dvth_n", "vdd"};
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < 3; ++i) {
    if (e[i] == 0) continue;
    if (!first) os << "*";
    os << vars[i];
    if (e[i] > 1) os << "^" << e[i];
    first = false;
  }
  return first ? "1" : os.str();
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::array<double, 3> normalize(const FitBox& box, double p, double n, double v) {
  const double x[3] = {p, n, v};
  std::array<double, 3> u{};
  for (int i = 0; i < 3; ++i) u[i] = (2.0 * x[i] - box.lo[i] - box.hi[i]) / (box.hi[i] - box.lo[i]);
  return u;
}

}  // namespace

bool FitBox::contains(double p, double n, double v) const {
  const double x[3] = {p, n, v};
  for (int i = 0; i < 3; ++i) {
    const double slack = 1e-12 * std::max(1.0, std::abs(hi[i] - lo[i]));
    if (!(x[i] >= lo[i] - slack && x[i] <= hi[i] + slack)) return false;
  }
  return true;
}

Polynomial3::Polynomial3(PolyBasis basis, int degree, FitBox box)
    : basis_(basis), degree_(degree), box_(box) {
  if (degree < 0) throw DomainError("polynomial degree must be >= 0");
  for (int i = 0; i < 3; ++i) {
    if (!(box.hi[i] > box.lo[i])) throw FitError("fit domain is degenerate along an axis");
  }
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; b <= degree; ++b) {
      for (int c = 0; c <= degree; ++c) {
        if (basis == PolyBasis::TotalDegree && a + b + c > degree) continue;
        exps_.push_back({a, b, c});
      }
    }
  }
  coefs_.assign(exps_.size(), 0.0);
  const auto d1 = std::size_t(degree + 1);
  dense_.assign(d1 * d1 * d1, 0.0);
}

std::size_t Polynomial3::coefficient_count(PolyBasis basis, int degree) {
  const auto d = std::size_t(degree);
  if (basis == PolyBasis::Tensor) return (d + 1) * (d + 1) * (d + 1);
  return (d + 1) * (d + 2) * (d + 3) / 6;
}

void Polynomial3::set_coefficients(std::vector<double> c) {
  if (c.size() != exps_.size()) throw DomainError("coefficient count does not match the basis");
  coefs_ = std::move(c);
  const auto d1 = std::size_t(degree_ + 1);
  std::fill(dense_.begin(), dense_.end(), 0.0);
  for (std::size_t k = 0; k < exps_.size(); ++k) {
    const auto& e = exps_[k];
    dense_[(std::size_t(e[0]) * d1 + std::size_t(e[1])) * d1 + std::size_t(e[2])] = coefs_[k];
  }
}

double Polynomial3::operator()(double p, double n, double v) const {
  const auto u = normalize(box_, p, n, v);
  const auto d1 = std::size_t(degree_ + 1);
  double r = 0.0;
  for (std::size_t a = d1; a-- > 0;) {
    double rb = 0.0;
    for (std::size_t b = d1; b-- > 0;) {
      double rc = 0.0;
      const double* row = &dense_[(a * d1 + b) * d1];
      for (std::size_t c = d1; c-- > 0;) rc = rc * u[2] + row[c];
      rb = rb * u[1] + rc;
    }
    r = r * u[0] + rb;
  }
  return r;
}

std::vector<double> Polynomial3::raw_coefficients() const {
  // u_i = s_i·x_i + o_i
  std::array<double, 3> s{}, o{};
  for (int i = 0; i < 3; ++i) {
    const double w = box_.hi[i] - box_.lo[i];
    s[i] = 2.0 / w;
    o[i] = -(box_.lo[i] + box_.hi[i]) / w;
  }
  auto term = [&](int axis, int power, int k) {
    return binomial(power, k) * std::pow(s[axis], k) * std::pow(o[axis], power - k);
  };
  std::map<std::array<int, 3>, double> raw;
  for (std::size_t q = 0; q < exps_.size(); ++q) {
    const auto& e = exps_[q];
    for (int i = 0; i <= e[0]; ++i) {
      for (int j = 0; j <= e[1]; ++j) {
        for (int k = 0; k <= e[2]; ++k) {
          raw[{i, j, k}] += coefs_[q] * term(0, e[0], i) * term(1, e[1], j) * term(2, e[2], k);
        }
      }
    }
  }
  std::vector<double> out;
  out.reserve(exps_.size());
  for (const auto& e : exps_) out.push_back(raw[e]);
  return out;
}

Polynomial3 fit_polynomial(const std::vector<std::array<double, 3>>& points,
                           const std::vector<double>& values, int degree, PolyBasis basis) {
  if (points.size() != values.size()) throw FitError("point and value counts differ");
  const std::size_t k = Polynomial3::coefficient_count(basis, degree);
  if (points.size() < k) {
    throw FitError("need at least " + std::to_string(k) + " samples for " + std::to_string(k) +
                   " coefficients, got " + std::to_string(points.size()));
  }
  FitBox box;
  for (int i = 0; i < 3; ++i) {
    box.lo[i] = box.hi[i] = points.front()[i];
    for (const auto& x : points) {
      if (!std::isfinite(x[i])) throw FitError("non-finite sample coordinate");
      box.lo[i] = std::min(box.lo[i], x[i]);
      box.hi[i] = std::max(box.hi[i], x[i]);
    }
  }
  Polynomial3 poly(basis, degree, box);
  const auto& exps = poly.exponents();

  const auto m = Eigen::Index(points.size());
  const auto cols = Eigen::Index(k);
  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& x = points[std::size_t(r)];
    const auto u = normalize(box, x[0], x[1], x[2]);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = exps[std::size_t(c)];
      a(r, c) = std::pow(u[0], e[0]) * std::pow(u[1], e[1]) * std::pow(u[2], e[2]);
    }
    y(r) = values[std::size_t(r)];
    if (!std::isfinite(y(r))) throw FitError("non-finite sample value");
  }
  Eigen::VectorXd scale(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double rms = a.col(c).norm() / std::sqrt(double(m));
    scale(c) = rms > 0.0 ? 1.0 / rms : 1.0;
    a.col(c) *= scale(c);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < cols) {
    std::ostringstream os;
    os << "design matrix has rank " << qr.rank() << " < " << cols << "; deficient monomials:";
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index c = qr.rank(); c < cols; ++c) os << " " << monomial_name(exps[std::size_t(perm(c))]);
    throw FitError(os.str());
  }
  const Eigen::VectorXd z = qr.solve(y);
  std::vector<double> coefs(k);
  for (Eigen::Index c = 0; c < cols; ++c) coefs[std::size_t(c)] = z(c) * scale(c);
  poly.set_coefficients(std::move(coefs));
  return poly;
}

DelayEval DelaySurrogate::evaluate(double dvth_p, double dvth_n, double v_dd) const {
  return {delay(dvth_p, dvth_n, v_dd), !delay.box().contains(dvth_p, dvth_n, v_dd)};
}

std::optional<double> DelaySurrogate::transition_ns(double dvth_p, double dvth_n,
                                                    double v_dd) const {
  if (!transition) return std::nullopt;
  return (*transition)(dvth_p, dvth_n, v_dd);
}

double residual_rms(const Polynomial3& poly, const std::vector<DelaySample>& samples) {
  if (samples.empty()) return 0.0;
  double ss = 0.0;
  for (const auto& s : samples) {
    const double r = poly(s.dvth_p, s.dvth_n, s.v_dd) - s.delay_ns;
    ss += r * r;
  }
  return std::sqrt(ss / double(samples.size()));
}

DelaySurrogate fit_delay(const std::vector<DelaySample>& samples, int degree, PolyBasis basis) {
  std::vector<std::array<double, 3>> pts;
  std::vector<double> d;
  std::vector<double> tr;
  bool have_transition = !samples.empty();
  for (const auto& s : samples) {
    if (!(s.delay_ns > 0.0) || !(s.v_dd > 0.0) || s.dvth_p < 0.0 || s.dvth_n < 0.0) {
      throw FitError("invalid delay sample (delay and V_DD must be > 0, shifts >= 0)");
    }
    pts.push_back({s.dvth_p, s.dvth_n, s.v_dd});
    d.push_back(s.delay_ns);
    if (s.transition_ns) {
      tr.push_back(*s.transition_ns);
    } else {
      have_transition = false;
    }
  }
  DelaySurrogate out;
  out.delay = fit_polynomial(pts, d, degree, basis);
  out.rmse_ns = residual_rms(out.delay, samples);
  if (have_transition) {
    out.transition = fit_polynomial(pts, tr, degree, basis);
    double ss = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double r = (*out.transition)(pts[i][0], pts[i][1], pts[i][2]) - tr[i];
      ss += r * r;
    }
    out.transition_rmse_ns = std::sqrt(ss / double(pts.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void write_poly(std::ostream& os, const char* kind, const Polynomial3& p, double rmse) {
  os << "surrogate " << kind << "\n";
  os << "basis " << basis_name(p.basis()) << "\n";
  os << "degree " << p.degree() << "\n";
  os << "lo " << fmt_double(p.box().lo[0]) << " " << fmt_double(p.box().lo[1]) << " "
     << fmt_double(p.box().lo[2]) << "\n";
  os << "hi " << fmt_double(p.box().hi[0]) << " " << fmt_double(p.box().hi[1]) << " "
     << fmt_double(p.box().hi[2]) << "\n";
  os << "rmse_ns " << fmt_double(rmse) << "\n";
  os << "coefficients " << p.coefficients().size() << "\n";
  for (std::size_t k = 0; k < p.coefficients().size(); ++k) {
    const auto& e = p.exponents()[k];
    os << e[0] << " " << e[1] << " " << e[2] << " " << fmt_double(p.coefficients()[k]) << "\n";
  }
  os << "end\n";
}

template <class T>
T expect(std::istream& is, const std::string& key) {
  std::string k;
  T value{};
  if (!(is >> k) || k != key || !(is >> value)) {
    throw ConfigError("surrogate file: expected '" + key + "'");
  }
  return value;
}

Polynomial3 read_poly(std::istream& is, double& rmse) {
  const PolyBasis basis = parse_basis(expect<std::string>(is, "basis"));
  const int degree = expect<int>(is, "degree");
  FitBox box;
  std::string k;
  if (!(is >> k) || k != "lo" || !(is >> box.lo[0] >> box.lo[1] >> box.lo[2])) {
    throw ConfigError("surrogate file: expected 'lo'");
  }
  if (!(is >> k) || k != "hi" || !(is >> box.hi[0] >> box.hi[1] >> box.hi[2])) {
    throw ConfigError("surrogate file: expected 'hi'");
  }
  rmse = expect<double>(is, "rmse_ns");
  const auto count = expect<std::size_t>(is, "coefficients");
  Polynomial3 p(basis, degree, box);
  if (count != p.exponents().size()) throw ConfigError("surrogate file: wrong coefficient count");
  std::map<std::array<int, 3>, double> by_exp;
  for (std::size_t i = 0; i < count; ++i) {
    std::array<int, 3> e{};
    double c = 0.0;
    if (!(is >> e[0] >> e[1] >> e[2] >> c)) throw ConfigError("surrogate file: bad coefficient line");
    by_exp[e] = c;
  }
  std::vector<double> coefs;
  for (const auto& e : p.exponents()) {
    const auto it = by_exp.find(e);
    if (it == by_exp.end()) throw ConfigError("surrogate file: missing monomial " + monomial_name(e));
    coefs.push_back(it->second);
  }
  p.set_coefficients(std::move(coefs));
  if (!(is >> k) || k != "end") throw ConfigError("surrogate file: missing 'end'");
  return p;
}

}  // namespace

std::string serialize(const DelaySurrogate& s) {
  std::ostringstream os;
  write_poly(os, "delay", s.delay, s.rmse_ns);
  if (s.transition) write_poly(os, "transition", *s.transition, s.transition_rmse_ns);
  return os.str();
}

DelaySurrogate deserialize_surrogate(const std::string& text) {
  std::istringstream lines(text);
  std::ostringstream body;
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.front() == '#') continue;
    body << line << "\n";
  }
  std::istringstream is(body.str());
  DelaySurrogate out;
  bool have_delay = false;
  std::string k, kind;
  while (is >> k) {
    if (k != "surrogate" || !(is >> kind)) throw ConfigError("surrogate file: expected 'surrogate'");
    if (kind == "delay") {
      out.delay = read_poly(is, out.rmse_ns);
      have_delay = true;
    } else if (kind == "transition") {
      double r = 0.0;
      out.transition = read_poly(is, r);
      out.transition_rmse_ns = r;
    } else {
      throw ConfigError("surrogate file: unknown section '" + kind + "'");
    }
  }
  if (!have_delay) throw ConfigError("surrogate file: no delay section");
  return out;
}

void save_surrogate(const DelaySurrogate& s, const std::string& path, const std::string& header) {
  write_file_atomic(path, header + serialize(s));
}

DelaySurrogate load_surrogate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open surrogate file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_surrogate(ss.str());
}

std::vector<DelaySample> average_duplicate_points(const std::vector<DelaySample>& samples) {
  struct Acc {
    double delay = 0.0;
    double tr = 0.0;
    int count = 0;
    bool has_tr = true;
  };
  std::map<std::array<double, 3>, Acc> acc;
  std::vector<std::array<double, 3>> order;
  for (const auto& s : samples) {
    const std::array<double, 3> key{s.dvth_p, s.dvth_n, s.v_dd};
    auto [it, inserted] = acc.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.delay += s.delay_ns;
    it->second.count += 1;
    if (s.transition_ns) {
      it->second.tr += *s.transition_ns;
    } else {
      it->second.has_tr = false;
    }
  }
  std::vector<DelaySample> out;
  for (const auto& key : order) {
    const Acc& a = acc[key];
    DelaySample s{key[0], key[1], key[2], a.delay / a.count, std::nullopt};
    if (a.has_tr) s.transition_ns = a.tr / a.count;
    out.push_back(s);
  }
  return out;
}

std::vector<DelaySample> load_sweep_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const auto cp = t.column("dvth_p_v");
  const auto cn = t.column("dvth_n_v");
  const auto cv = t.column("vdd_v");
  const auto cd = t.column("delay_ns");
  std::optional<std::size_t> ct;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == "transition_ns") ct = i;
  }
  std::vector<DelaySample> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    DelaySample s{t.number(r, cp), t.number(r, cn), t.number(r, cv), t.number(r, cd), std::nullopt};
    if (ct) s.transition_ns = t.number(r, *ct);
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError("sweep CSV '" + path + "' has no samples");
  return average_duplicate_points(out);
}

std::string sweep_csv(const std::vector<DelaySample>& samples) {
  const bool tr = !samples.empty() &&
                  std::all_of(samples.begin(), samples.end(),
                              [](const DelaySample& s) { return s.transition_ns.has_value(); });
  std::ostringstream os;
  os << "dvth_p_v,dvth_n_v,vdd_v,delay_ns" << (tr ? ",transition_ns" : "") << "\n";
  for (const auto& s : samples) {
    os << fmt_double(s.dvth_p) << "," << fmt_double(s.dvth_n) << "," << fmt_double(s.v_dd) << ","
       << fmt_double(s.delay_ns);
    if (tr) os << "," << fmt_double(*s.transition_ns);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

void SyntheticDelayConfig::validate() const {
  std::ostringstream os;
  if (!(nominal_delay_ns > 0.0)) os << "nominal_delay_ns must be > 0; ";
  if (!(v_nominal > vth0)) os << "v_nominal must exceed vth0; ";
  if (!(alpha > 0.0)) os << "alpha must be > 0; ";
  if (!(w_p >= 0.0) || !(w_n >= 0.0)) os << "weights must be >= 0; ";
  if (!(nominal_transition_ns > 0.0)) os << "nominal_transition_ns must be > 0; ";
  for (const SweepAxis* a : {&dvth_p, &dvth_n, &v_dd}) {
    if (a->points < 2 || !(a->hi > a->lo)) os << "sweep axes need hi > lo and >= 2 points; ";
  }
  if (!(dvth_p.lo >= 0.0) || !(dvth_n.lo >= 0.0)) os << "shift sweeps must start at >= 0; ";
  if (!os.str().empty()) throw ConfigError("synthetic delay: " + os.str());
}

double SyntheticDelayConfig::delay_ns(double dvth_p_v, double dvth_n_v, double vdd) const {
  const double vth = vth0 + w_p * dvth_p_v + w_n * dvth_n_v;
  if (!(vdd > vth)) {
    std::ostringstream os;
    os << "synthetic delay undefined: V_DD " << vdd << " V <= effective V_th " << vth << " V";
    throw DomainError(os.str());
  }
  const double c = nominal_delay_ns * std::pow(v_nominal - vth0, alpha) / v_nominal;
  return c * vdd / std::pow(vdd - vth, alpha);
}

double SyntheticDelayConfig::transition_ns(double dvth_p_v, double dvth_n_v, double vdd) const {
  return nominal_transition_ns * delay_ns(dvth_p_v, dvth_n_v, vdd) / nominal_delay_ns;
}

std::vector<DelaySample> SyntheticDelayConfig::sweep() const {
  validate();
  auto axis = [](const SweepAxis& a, int i) {
    return a.lo + (a.hi - a.lo) * double(i) / double(a.points - 1);
  };
  std::vector<DelaySample> out;
  for (int i = 0; i < dvth_p.points; ++i) {
    for (int j = 0; j < dvth_n.points; ++j) {
      for (int k = 0; k < v_dd.points; ++k) {
        const double p = axis(dvth_p, i);
        const double n = axis(dvth_n, j);
        const double v = axis(v_dd, k);
        out.push_back({p, n, v, delay_ns(p, n, v), transition_ns(p, n, v)});
      }
    }
  }
  return out;
}

FitBox SyntheticDelayConfig::box() const {
  return {{dvth_p.lo, dvth_n.lo, v_dd.lo}, {dvth_p.hi, dvth_n.hi, v_dd.hi}};
}

}  // namespace avsim
