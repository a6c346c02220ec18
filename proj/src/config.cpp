#include "avsim/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "avsim/csv.hpp"
#include "avsim/errors.hpp"

namespace avsim {

namespace pt = boost::property_tree;

double parse_duration(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c != ' ' && c != '\t') s.push_back(c);
  }
  if (s.empty()) throw ConfigError("empty duration");
  double unit = 1.0;
  switch (s.back()) {
    case 's': unit = 1.0; s.pop_back(); break;
    case 'd': unit = 86400.0; s.pop_back(); break;
    case 'y': unit = kSecondsPerYear; s.pop_back(); break;
    default: break;
  }
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid duration '" + text + "' (expected a number with s|d|y suffix)");
  }
  if (used != s.size() || !std::isfinite(x) || x < 0.0) {
    throw ConfigError("invalid duration '" + text + "' (expected a number with s|d|y suffix)");
  }
  return x * unit;
}

namespace {

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

  template <class T>
  void get(const std::string& section, const std::string& key, T& out) {
    seen_.insert(section + "/" + key);
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '/'));
    if (!sec) return;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '/'));
    if (!v) return;
    out = convert<T>(*v, section, key);
  }

  void duration(const std::string& section, const std::string& key, double& out) {
    std::string raw;
    get(section, key, raw);
    if (!raw.empty()) out = parse_duration(raw);
  }

  void check_unknown() const {
    for (const auto& [sec, child] : tree_) {
      if (child.empty() && !child.data().empty()) {
        throw ConfigError(origin_ + ": key '" + sec + "' outside any section");
      }
      for (const auto& kv : child) {
        if (!seen_.count(sec + "/" + kv.first)) {
          throw ConfigError(origin_ + ": unknown key '" + kv.first + "' in section [" + sec + "]");
        }
      }
    }
  }

 private:
  template <class T>
  T convert(const std::string& v, const std::string& section, const std::string& key) const {
    if constexpr (std::is_same_v<T, std::string>) {
      return v;
    } else {
      std::istringstream is(v);
      T x{};
      is >> x;
      if (!is || !(is >> std::ws).eof()) {
        throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + v + "' is not valid");
      }
      return x;
    }
  }

  const pt::ptree& tree_;
  std::string origin_;
  std::set<std::string> seen_;
};

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

void read_trap(Reader& r, const std::string& sec, TrapSpecies& s) {
  r.get(sec, "A_c", s.A_c);
  r.get(sec, "B_c", s.B_c);
  r.get(sec, "E_ac", s.E_ac);
  r.get(sec, "n_c", s.n_c);
  r.get(sec, "A_e", s.A_e);
  r.get(sec, "B_e", s.B_e);
  r.get(sec, "E_ae", s.E_ae);
  r.get(sec, "beta_e", s.beta_e);
  r.get(sec, "r_perm", s.r_perm);
}

void read_hci(Reader& r, const std::string& sec, HciParams& h) {
  r.get(sec, "A_h", h.A_h);
  r.get(sec, "B_h", h.B_h);
  r.get(sec, "E_ah", h.E_ah);
  r.get(sec, "n_h", h.n_h);
}

void read_axis(Reader& r, const std::string& name, SweepAxis& a) {
  r.get("synthetic_delay", name + "_lo", a.lo);
  r.get("synthetic_delay", name + "_hi", a.hi);
  r.get("synthetic_delay", name + "_points", a.points);
}

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError(what + " '" + path + "' does not exist");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Reader r(tree, origin);
  RunConfig cfg;

  std::string traps;
  for (std::size_t i = 0; i < cfg.aging.bti_traps.size(); ++i) {
    traps += (i ? "," : "") + cfg.aging.bti_traps[i].name;
  }
  r.get("aging", "traps", traps);
  r.get("aging", "temperature_K", cfg.aging.temperature_K);
  r.get("aging", "bti_temperature_offset_K", cfg.aging.bti_temperature_offset_K);
  r.get("aging", "hci_temperature_offset_K", cfg.aging.hci_temperature_offset_K);
  std::vector<TrapSpecies> species;
  for (const auto& name : split_names(traps)) {
    TrapSpecies s;
    for (const auto& d : cfg.aging.bti_traps) {
      if (d.name == name) s = d;
    }
    s.name = name;
    read_trap(r, "trap_" + name, s);
    species.push_back(s);
  }
  cfg.aging.bti_traps = species;
  read_hci(r, "hci_pmos", cfg.aging.hci_pmos);
  read_hci(r, "hci_nmos", cfg.aging.hci_nmos);

  auto& w = cfg.workload;
  r.get("workload", "duty_factor", w.duty_factor);
  r.get("workload", "toggle_rate", w.toggle_rate);
  r.get("workload", "t_clk", w.t_clk);
  r.get("workload", "transition_time", w.transition_time);
  r.get("workload", "trace_csv", cfg.trace_csv);
  r.get("workload", "transition_csv", cfg.transition_csv);
  r.get("workload", "transition_intervals", cfg.avs.transition_intervals);

  std::string source = "synthetic";
  std::string basis = "total";
  r.get("delay", "source", source);
  r.get("delay", "sweep_csv", cfg.delay.sweep_csv);
  r.get("delay", "model_file", cfg.delay.model_file);
  r.get("delay", "degree", cfg.delay.degree);
  r.get("delay", "basis", basis);
  if (source == "synthetic") {
    cfg.delay.source = DelaySource::Synthetic;
  } else if (source == "csv") {
    cfg.delay.source = DelaySource::Csv;
  } else if (source == "load") {
    cfg.delay.source = DelaySource::Load;
  } else {
    throw ConfigError(origin + ": [delay] source must be synthetic, csv or load");
  }
  if (basis == "total") {
    cfg.delay.basis = PolyBasis::TotalDegree;
  } else if (basis == "tensor") {
    cfg.delay.basis = PolyBasis::Tensor;
  } else {
    throw ConfigError(origin + ": [delay] basis must be total or tensor");
  }
  auto& sd = cfg.delay.synthetic;
  r.get("synthetic_delay", "nominal_delay_ns", sd.nominal_delay_ns);
  r.get("synthetic_delay", "v_nominal", sd.v_nominal);
  r.get("synthetic_delay", "vth0", sd.vth0);
  r.get("synthetic_delay", "alpha", sd.alpha);
  r.get("synthetic_delay", "w_p", sd.w_p);
  r.get("synthetic_delay", "w_n", sd.w_n);
  r.get("synthetic_delay", "nominal_transition_ns", sd.nominal_transition_ns);
  read_axis(r, "dvth_p", sd.dvth_p);
  read_axis(r, "dvth_n", sd.dvth_n);
  read_axis(r, "vdd", sd.v_dd);

  auto& a = cfg.avs;
  double threshold = std::nan("");
  r.get("avs", "v_init", a.v_init);
  r.get("avs", "v_step", a.v_step);
  r.get("avs", "v_max_cap", a.v_max_cap);
  r.get("avs", "delay_threshold", threshold);
  r.duration("avs", "horizon", a.horizon);
  r.get("avs", "checkpoints_per_decade", a.checkpoints_per_decade);
  r.duration("avs", "first_checkpoint", a.first_checkpoint);
  r.duration("avs", "locate_tolerance", a.locate_tolerance);
  r.get("avs", "branch_factor", a.branch_factor);
  a.t_clk = w.t_clk;
  a.delay_threshold = std::isnan(threshold) ? w.t_clk : threshold;

  auto& p = cfg.policy;
  r.get("policy", "budget", p.budget);
  r.get("policy", "s_cap", p.s_cap);
  r.get("policy", "bits", p.bits);
  r.get("policy", "population_csv", p.population_csv);
  r.get("policy", "profiles_csv", p.profiles_csv);
  r.get("policy", "path_count", p.path_count);
  r.get("policy", "path_sigma", p.path_sigma);
  r.get("policy", "seed", p.seed);

  r.get("power", "p0_w", cfg.power.p0);
  r.get("power", "v_ref", cfg.power.v_ref);
  r.get("power", "exponent", cfg.power.exponent);
  r.get("power", "leakage_fraction", cfg.power.leakage_fraction);

  r.get("output", "dir", cfg.output_dir);
  r.check_unknown();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void RunConfig::validate() const {
  aging.validate();
  if (aging.bti_traps.empty()) throw ConfigError("aging: at least one trap species is required");
  workload.validate();
  avs.validate();
  if (std::abs(avs.t_clk - workload.t_clk) > 0.0) throw ConfigError("avs t_clk must equal workload t_clk");
  if (delay.degree < 0 || delay.degree > 12) throw ConfigError("delay: degree must lie in [0, 12]");
  switch (delay.source) {
    case DelaySource::Synthetic: delay.synthetic.validate(); break;
    case DelaySource::Csv: require_file(delay.sweep_csv, "delay sweep CSV"); break;
    case DelaySource::Load: require_file(delay.model_file, "delay model file"); break;
  }
  if (!trace_csv.empty()) require_file(trace_csv, "workload trace CSV");
  if (!transition_csv.empty()) require_file(transition_csv, "transition waveform CSV");
  if (!(policy.budget >= 0.0)) throw ConfigError("policy: budget must be >= 0");
  if (!(policy.s_cap >= 1.0)) throw ConfigError("policy: s_cap must be >= 1");
  if (policy.bits < 1) throw ConfigError("policy: bits must be >= 1");
  if (policy.path_count < 1) throw ConfigError("policy: path_count must be >= 1");
  if (!(policy.path_sigma > 0.0)) throw ConfigError("policy: path_sigma must be > 0");
  if (!policy.population_csv.empty()) require_file(policy.population_csv, "path population CSV");
  if (!policy.profiles_csv.empty()) require_file(policy.profiles_csv, "resilience profile CSV");
  power.validate();
  if (output_dir.empty()) throw ConfigError("output: dir must not be empty");
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto num = [&](const char* k, double v) { kv(k, fmt_double(v)); };
  auto dur = [&](const char* k, double v) { kv(k, fmt_double(v) + "s"); };

  os << "[aging]\n";
  std::string traps;
  for (std::size_t i = 0; i < cfg.aging.bti_traps.size(); ++i) {
    traps += (i ? "," : "") + cfg.aging.bti_traps[i].name;
  }
  kv("traps", traps);
  num("temperature_K", cfg.aging.temperature_K);
  num("bti_temperature_offset_K", cfg.aging.bti_temperature_offset_K);
  num("hci_temperature_offset_K", cfg.aging.hci_temperature_offset_K);
  for (const auto& s : cfg.aging.bti_traps) {
    os << "\n[trap_" << s.name << "]\n";
    num("A_c", s.A_c);
    num("B_c", s.B_c);
    num("E_ac", s.E_ac);
    num("n_c", s.n_c);
    num("A_e", s.A_e);
    num("B_e", s.B_e);
    num("E_ae", s.E_ae);
    num("beta_e", s.beta_e);
    num("r_perm", s.r_perm);
  }
  for (const auto& [name, h] : {std::pair{"pmos", cfg.aging.hci_pmos}, std::pair{"nmos", cfg.aging.hci_nmos}}) {
    os << "\n[hci_" << name << "]\n";
    num("A_h", h.A_h);
    num("B_h", h.B_h);
    num("E_ah", h.E_ah);
    num("n_h", h.n_h);
  }

  os << "\n[workload]\n";
  num("duty_factor", cfg.workload.duty_factor);
  num("toggle_rate", cfg.workload.toggle_rate);
  num("t_clk", cfg.workload.t_clk);
  num("transition_time", cfg.workload.transition_time);
  kv("trace_csv", cfg.trace_csv);
  kv("transition_csv", cfg.transition_csv);
  kv("transition_intervals", std::to_string(cfg.avs.transition_intervals));

  os << "\n[delay]\n";
  kv("source", cfg.delay.source == DelaySource::Synthetic ? "synthetic"
               : cfg.delay.source == DelaySource::Csv     ? "csv"
                                                          : "load");
  kv("sweep_csv", cfg.delay.sweep_csv);
  kv("model_file", cfg.delay.model_file);
  kv("degree", std::to_string(cfg.delay.degree));
  kv("basis", cfg.delay.basis == PolyBasis::Tensor ? "tensor" : "total");

  const auto& sd = cfg.delay.synthetic;
  os << "\n[synthetic_delay]\n";
  num("nominal_delay_ns", sd.nominal_delay_ns);
  num("v_nominal", sd.v_nominal);
  num("vth0", sd.vth0);
  num("alpha", sd.alpha);
  num("w_p", sd.w_p);
  num("w_n", sd.w_n);
  num("nominal_transition_ns", sd.nominal_transition_ns);
  for (const auto& [name, ax] : {std::pair{"dvth_p", sd.dvth_p}, std::pair{"dvth_n", sd.dvth_n},
                                 std::pair{"vdd", sd.v_dd}}) {
    const std::string n(name);
    kv((n + "_lo").c_str(), fmt_double(ax.lo));
    kv((n + "_hi").c_str(), fmt_double(ax.hi));
    kv((n + "_points").c_str(), std::to_string(ax.points));
  }

  os << "\n[avs]\n";
  num("v_init", cfg.avs.v_init);
  num("v_step", cfg.avs.v_step);
  num("v_max_cap", cfg.avs.v_max_cap);
  num("delay_threshold", cfg.avs.delay_threshold);
  dur("horizon", cfg.avs.horizon);
  num("checkpoints_per_decade", cfg.avs.checkpoints_per_decade);
  dur("first_checkpoint", cfg.avs.first_checkpoint);
  dur("locate_tolerance", cfg.avs.locate_tolerance);
  kv("branch_factor", std::to_string(cfg.avs.branch_factor));

  os << "\n[policy]\n";
  num("budget", cfg.policy.budget);
  num("s_cap", cfg.policy.s_cap);
  kv("bits", std::to_string(cfg.policy.bits));
  kv("population_csv", cfg.policy.population_csv);
  kv("profiles_csv", cfg.policy.profiles_csv);
  kv("path_count", std::to_string(cfg.policy.path_count));
  num("path_sigma", cfg.policy.path_sigma);
  kv("seed", std::to_string(cfg.policy.seed));

  os << "\n[power]\n";
  num("p0_w", cfg.power.p0);
  num("v_ref", cfg.power.v_ref);
  num("exponent", cfg.power.exponent);
  num("leakage_fraction", cfg.power.leakage_fraction);

  os << "\n[output]\n";
  kv("dir", cfg.output_dir);
  return os.str();
}

std::string dump_defaults() { return dump_config(RunConfig{}); }

std::string config_hash(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.output_dir = "-";  // where results go does not change what they are
  const std::string text = dump_config(c);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw InternalError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

}  // namespace avsim
