#ifndef BNSF_CONFIG_HPP
#define BNSF_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gas_model.hpp"

namespace bnsf {

/// Configuration error carrying the offending key (section.key) or line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every tunable of the command-line tool, grouped as in the config file.
struct RunConfig {
  // [gas]
  GasParams gas;
  // [shock]
  double v_minus = 1.0, u_minus = 0.0, theta_minus = 0.1, eps = 0.05;
  int family = 3;
  // [weight]
  double lambda = 0.5, delta3 = 0.1;
  // [grid]
  double L = 720.0;
  int N = 1024;
  double cfl = 0.5;
  // [shift]
  double eps_shift = 0.0;
  // [run]
  double T = 1.0, sample_every = 0.1, E0 = 1e-3, width = 30.0, center = 10.0;
  // [sweep]
  std::vector<double> nu_list{0.2, 0.1, 0.05};
  double sweep_E0 = 1e-3, sweep_T = 1.0, r_support = 40.0, sweep_L = 150.0;
  int N0 = 1024;
  // [verify]
  double delta = 0.01, C1 = 1.0, delta1 = 0.01;
  int resolution = 2000;
  long budget = 10000;
  std::uint64_t seed = 1;
  // [output]
  std::string out_dir = "out";

  bool operator==(const RunConfig& o) const {
    return gas.R == o.gas.R && gas.gamma == o.gas.gamma && gas.tau0 == o.gas.tau0 && v_minus == o.v_minus &&
           u_minus == o.u_minus && theta_minus == o.theta_minus && eps == o.eps && family == o.family &&
           lambda == o.lambda && delta3 == o.delta3 && L == o.L && N == o.N && cfl == o.cfl &&
           eps_shift == o.eps_shift && T == o.T && sample_every == o.sample_every && E0 == o.E0 &&
           width == o.width && center == o.center && nu_list == o.nu_list && sweep_E0 == o.sweep_E0 &&
           sweep_T == o.sweep_T && r_support == o.r_support && sweep_L == o.sweep_L && N0 == o.N0 &&
           delta == o.delta && C1 == o.C1 && delta1 == o.delta1 && resolution == o.resolution &&
           budget == o.budget && seed == o.seed && out_dir == o.out_dir;
  }

  State left() const { return {v_minus, u_minus, theta_minus}; }
  Family shock_family() const { return family == 1 ? Family::One : Family::Three; }

  void validate() const {
    try {
      gas.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    auto need = [](bool ok, const char* what) {
      if (!ok) throw ConfigError(what);
    };
    need(v_minus > 0.0, "shock: v_minus>0 violated");
    need(theta_minus > 0.0, "shock: theta_minus>0 violated");
    need(eps >= 0.0, "shock: eps>=0 violated");
    need(family == 1 || family == 3, "shock: family in {1,3} violated");
    need(lambda > 0.0, "weight: lambda>0 violated");
    need(delta3 > 0.0, "weight: delta3>0 violated");
    need(L > 0.0, "grid: L>0 violated");
    need(N >= 16, "grid: N>=16 violated");
    need(cfl > 0.0 && cfl <= 0.9, "grid: 0<cfl<=0.9 violated");
    need(eps_shift >= 0.0, "shift: eps_shift>=0 violated");
    need(T > 0.0, "run: T>0 violated");
    need(sample_every > 0.0, "run: sample_every>0 violated");
    need(E0 >= 0.0, "run: E0>=0 violated");
    need(width > 0.0, "run: width>0 violated");
    need(!nu_list.empty(), "sweep: nu_list nonempty violated");
    for (std::size_t i = 0; i < nu_list.size(); ++i) {
      need(nu_list[i] > 0.0, "sweep: nu_list positive violated");
      if (i > 0) need(nu_list[i] < nu_list[i - 1], "sweep: nu_list strictly decreasing violated");
    }
    need(sweep_E0 >= 0.0, "sweep: E0>=0 violated");
    need(sweep_T > 0.0, "sweep: T>0 violated");
    need(r_support > 0.0, "sweep: r_support>0 violated");
    need(sweep_L > 0.0, "sweep: L>0 violated");
    need(N0 >= 16, "sweep: N0>=16 violated");
    need(delta > 0.0, "verify: delta>0 violated");
    need(C1 > 0.0, "verify: C1>0 violated");
    need(delta1 >= 0.0 && delta1 < 1.0, "verify: 0<=delta1<1 violated");
    need(resolution >= 1000, "verify: resolution>=1000 violated");
    need(budget >= 0, "verify: budget>=0 violated");
    need(!out_dir.empty(), "output: dir nonempty violated");
  }
};

namespace detail {

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(key + ": expected a number, got '" + s + "'");
  return x;
}

inline long parse_long(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  long x;
  try {
    x = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return x;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a == std::string::npos) throw ConfigError(key + ": empty list entry");
    out.push_back(parse_double(key, item.substr(a, b - a + 1)));
  }
  return out;
}

/// Accessors for every documented key: name -> (read, write).
struct KeyTable {
  struct Entry {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
  };
  std::vector<std::pair<std::string, Entry>> entries;  // "section.key", in echo order

  const Entry* find(const std::string& k) const {
    for (const auto& [name, e] : entries)
      if (name == k) return &e;
    return nullptr;
  }
};

inline const KeyTable& key_table() {
  static const KeyTable table = [] {
    KeyTable t;
    auto dbl = [&](const char* name, double RunConfig::*m) {
      t.entries.push_back({name,
                           {[m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_double(k, v); },
                            [m](const RunConfig& c) { return fmt17(c.*m); }}});
    };
    auto gas = [&](const char* name, double GasParams::*m) {
      t.entries.push_back(
          {name,
           {[m](RunConfig& c, const std::string& k, const std::string& v) { c.gas.*m = parse_double(k, v); },
            [m](const RunConfig& c) { return fmt17(c.gas.*m); }}});
    };
    auto integer = [&](const char* name, auto RunConfig::*m) {
      t.entries.push_back({name,
                           {[m](RunConfig& c, const std::string& k, const std::string& v) {
                              c.*m = static_cast<std::remove_reference_t<decltype(c.*m)>>(parse_long(k, v));
                            },
                            [m](const RunConfig& c) { return std::to_string(c.*m); }}});
    };
    gas("gas.R", &GasParams::R);
    gas("gas.gamma", &GasParams::gamma);
    gas("gas.tau0", &GasParams::tau0);
    dbl("shock.v_minus", &RunConfig::v_minus);
    dbl("shock.u_minus", &RunConfig::u_minus);
    dbl("shock.theta_minus", &RunConfig::theta_minus);
    dbl("shock.eps", &RunConfig::eps);
    integer("shock.family", &RunConfig::family);
    dbl("weight.lambda", &RunConfig::lambda);
    dbl("weight.delta3", &RunConfig::delta3);
    dbl("grid.L", &RunConfig::L);
    integer("grid.N", &RunConfig::N);
    dbl("grid.cfl", &RunConfig::cfl);
    dbl("shift.eps_shift", &RunConfig::eps_shift);
    dbl("run.T", &RunConfig::T);
    dbl("run.sample_every", &RunConfig::sample_every);
    dbl("run.E0", &RunConfig::E0);
    dbl("run.width", &RunConfig::width);
    dbl("run.center", &RunConfig::center);
    t.entries.push_back({"sweep.nu_list",
                         {[](RunConfig& c, const std::string& k, const std::string& v) { c.nu_list = parse_list(k, v); },
                          [](const RunConfig& c) {
                            std::string s;
                            for (std::size_t i = 0; i < c.nu_list.size(); ++i)
                              s += (i ? "," : "") + fmt17(c.nu_list[i]);
                            return s;
                          }}});
    dbl("sweep.E0", &RunConfig::sweep_E0);
    dbl("sweep.T", &RunConfig::sweep_T);
    dbl("sweep.r_support", &RunConfig::r_support);
    dbl("sweep.L", &RunConfig::sweep_L);
    integer("sweep.N0", &RunConfig::N0);
    dbl("verify.delta", &RunConfig::delta);
    dbl("verify.C1", &RunConfig::C1);
    dbl("verify.delta1", &RunConfig::delta1);
    integer("verify.resolution", &RunConfig::resolution);
    integer("verify.budget", &RunConfig::budget);
    t.entries.push_back(
        {"verify.seed",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
            const long x = parse_long(k, v);
            if (x < 0) throw ConfigError(k + ": seed must be nonnegative");
            c.seed = static_cast<std::uint64_t>(x);
          },
          [](const RunConfig& c) { return std::to_string(c.seed); }}});
    t.entries.push_back({"output.dir",
                         {[](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
                          [](const RunConfig& c) { return c.out_dir; }}});
    return t;
  }();
  return table;
}

}  // namespace detail

/// Parse a sectioned key=value text. Unknown sections or keys are rejected.
inline RunConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  const auto& table = detail::key_table();
  for (const auto& [section, body] : pt) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(source + ": key '" + section + "' outside any section");
    for (const auto& [key, val] : body) {
      const std::string name = section + "." + key;
      const auto* e = table.find(name);
      if (!e) throw ConfigError(source + ": unknown key '" + name + "'");
      e->set(c, name, val.data());
    }
  }
  return c;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open");
  return parse_config(f, path);
}

/// Overrides from the environment: PREFIX_SECTION_KEY, e.g. BNSF_GAS_GAMMA=1.3.
/// Section and key are matched case-insensitively.
inline void apply_env_overrides(RunConfig& c, const std::string& prefix = "BNSF_") {
  for (const auto& [name, e] : detail::key_table().entries) {
    std::string var = prefix;
    for (char ch : name) var += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = std::getenv(var.c_str())) e.set(c, name + " (from " + var + ")", v);
  }
}

/// Config echo in the file format; parse_config of the output gives back an equal RunConfig.
inline std::string to_ini(const RunConfig& c) {
  std::string out, section;
  for (const auto& [name, e] : detail::key_table().entries) {
    const auto dot = name.find('.');
    const std::string s = name.substr(0, dot);
    if (s != section) {
      out += (section.empty() ? "" : "\n") + ("[" + s + "]\n");
      section = s;
    }
    out += name.substr(dot + 1) + " = " + e.get(c) + "\n";
  }
  return out;
}

}  // namespace bnsf

#endif
