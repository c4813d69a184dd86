#pragma once

// Run configuration: the problem, the scan window, tolerances and the
// analyses to run, read from a JSON document.

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscil/errors.hpp"
#include "oscil/expr.hpp"
#include "oscil/functional.hpp"
#include "oscil/ivp.hpp"

namespace oscil::report {

enum class Analysis { points, eigen, scan, verify };

inline const char* to_string(Analysis a) {
  switch (a) {
    case Analysis::points: return "points";
    case Analysis::eigen: return "eigen";
    case Analysis::scan: return "scan";
    case Analysis::verify: return "verify";
  }
  return "?";
}

/// "report" expands to every analysis.
inline std::vector<Analysis> parse_analysis(const std::string& name) {
  if (name == "points") return {Analysis::points};
  if (name == "eigen") return {Analysis::eigen};
  if (name == "scan") return {Analysis::scan};
  if (name == "verify") return {Analysis::verify};
  if (name == "report") return {Analysis::points, Analysis::eigen, Analysis::scan, Analysis::verify};
  throw ConfigError("analyses", "unknown analysis '" + name + "'");
}

struct CoefficientText {
  std::string r, p, q;

  expr::CoefficientSet parse() const { return expr::CoefficientSet::parse(r, p, q); }
};

/// Empty lists are filled with defaults derived from the problem.
struct EigenSettings {
  std::vector<double> b;
  int k = 2;
  double lambda_cap = 1e6;
  std::optional<double> lower_bound_b0;
  std::vector<double> wirtinger_b;
  int wirtinger_n = 12;
};

struct ScanSettings {
  std::vector<double> b_grid;
};

/// Empty paths are not written.
struct OutputPaths {
  std::string json, csv, transform_csv, scan_csv;
};

struct RunConfig {
  double a = 0.0;
  CoefficientText problem;
  double x_max = 0.0;
  Tolerance tol{};
  std::optional<CoefficientText> comparison;
  std::optional<functional::DivergenceFlags> divergence_flags;
  EigenSettings eigen;
  ScanSettings scan;
  std::vector<Analysis> analyses{Analysis::points, Analysis::eigen, Analysis::scan, Analysis::verify};
  OutputPaths outputs;

  expr::CoefficientSet coefficients() const { return problem.parse(); }

  bool wants(Analysis x) const {
    for (Analysis y : analyses)
      if (x == y) return true;
    return false;
  }
};

namespace detail {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
  if (j.is_object()) return;
  throw ConfigError(path, path.empty() ? "config must be a JSON object" : "key " + path + ": expected an object");
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(join(path, it.key()), "unknown key " + join(path, it.key()));
  }
}

inline const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "key " + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "key " + key + ": expected a finite number");
  return x;
}

inline std::optional<double> number(const json& j, const std::string& path, const char* key) {
  const json* v = find(j, key);
  if (!v) return std::nullopt;
  return as_number(*v, join(path, key));
}

inline std::optional<long long> integer(const json& j, const std::string& path, const char* key) {
  const json* v = find(j, key);
  if (!v) return std::nullopt;
  if (!v->is_number_integer()) throw ConfigError(join(path, key), "key " + join(path, key) + ": expected an integer");
  return v->get<long long>();
}

inline bool boolean(const json& j, const std::string& path, const char* key) {
  const json* v = find(j, key);
  if (!v) return false;
  if (!v->is_boolean()) throw ConfigError(join(path, key), "key " + join(path, key) + ": expected true or false");
  return v->get<bool>();
}

inline std::optional<std::string> text(const json& j, const std::string& path, const char* key) {
  const json* v = find(j, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw ConfigError(join(path, key), "key " + join(path, key) + ": expected a string");
  return v->get<std::string>();
}

inline std::vector<double> numbers(const json& j, const std::string& path, const char* key) {
  const json* v = find(j, key);
  if (!v) return {};
  const std::string name = join(path, key);
  if (!v->is_array()) throw ConfigError(name, "key " + name + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) out.push_back(as_number(e, name));
  return out;
}

/// Parses eagerly so that malformed text is reported before any integration.
inline std::string expression(const json& j, const std::string& path, const char* key) {
  const std::string name = join(path, key);
  const auto src = text(j, path, key);
  if (!src) throw ConfigError(name, "missing key " + name);
  try {
    (void)expr::Expression::parse(*src);
  } catch (const ParseError& e) {
    throw ConfigError(name, "key " + name + ": " + e.what());
  }
  return *src;
}

inline CoefficientText coefficient_text(const json& j, const std::string& path) {
  return {expression(j, path, "r"), expression(j, path, "p"), expression(j, path, "q")};
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, "key " + key + ": " + what);
}

inline void require_above(const std::vector<double>& xs, double a, const std::string& key, bool increasing) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(xs[i] > a, key, "values must exceed a");
    if (increasing && i > 0) require(xs[i] > xs[i - 1], key, "values must be strictly increasing");
  }
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  using namespace detail;
  reject_unknown(j, "", {"a", "r", "p", "q", "x_max", "tolerances", "comparison", "divergence_flags", "eigen", "scan",
                         "analyses", "outputs"});
  RunConfig cfg;
  cfg.a = number(j, "", "a").value_or(0.0);
  cfg.problem = coefficient_text(j, "");
  const auto x_max = number(j, "", "x_max");
  if (!x_max) throw ConfigError("x_max", "missing key x_max");
  cfg.x_max = *x_max;
  require(cfg.x_max > cfg.a, "x_max", "must exceed a");

  if (const json* t = find(j, "tolerances")) {
    reject_unknown(*t, "tolerances", {"rtol", "atol", "max_step", "max_steps"});
    cfg.tol.rtol = number(*t, "tolerances", "rtol").value_or(cfg.tol.rtol);
    cfg.tol.atol = number(*t, "tolerances", "atol").value_or(cfg.tol.atol);
    cfg.tol.max_step = number(*t, "tolerances", "max_step").value_or(cfg.tol.max_step);
    const auto steps = integer(*t, "tolerances", "max_steps");
    if (steps) {
      require(*steps > 0, "tolerances.max_steps", "must be positive");
      cfg.tol.max_steps = static_cast<std::size_t>(*steps);
    }
  }
  require(cfg.tol.rtol > 0, "tolerances.rtol", "must be positive");
  require(cfg.tol.atol > 0, "tolerances.atol", "must be positive");
  require(cfg.tol.max_step > 0, "tolerances.max_step", "must be positive");

  if (const json* c = find(j, "comparison")) {
    reject_unknown(*c, "comparison", {"r", "p", "q"});
    cfg.comparison = coefficient_text(*c, "comparison");
  }

  if (const json* d = find(j, "divergence_flags")) {
    reject_unknown(*d, "divergence_flags", {"int_q_diverges_to_minus_inf", "int_p_diverges", "int_inv_r_diverges"});
    cfg.divergence_flags = functional::DivergenceFlags{boolean(*d, "divergence_flags", "int_q_diverges_to_minus_inf"),
                                                       boolean(*d, "divergence_flags", "int_p_diverges"),
                                                       boolean(*d, "divergence_flags", "int_inv_r_diverges")};
  }

  if (const json* e = find(j, "eigen")) {
    reject_unknown(*e, "eigen", {"b", "k", "lambda_cap", "lower_bound_b0", "wirtinger_b", "wirtinger_n"});
    auto& s = cfg.eigen;
    s.b = numbers(*e, "eigen", "b");
    require_above(s.b, cfg.a, "eigen.b", false);
    if (const auto k = integer(*e, "eigen", "k")) {
      require(*k >= 1 && *k <= 50, "eigen.k", "must lie in [1, 50]");
      s.k = static_cast<int>(*k);
    }
    s.lambda_cap = number(*e, "eigen", "lambda_cap").value_or(s.lambda_cap);
    require(s.lambda_cap > 0, "eigen.lambda_cap", "must be positive");
    s.lower_bound_b0 = number(*e, "eigen", "lower_bound_b0");
    if (s.lower_bound_b0) require(*s.lower_bound_b0 > cfg.a, "eigen.lower_bound_b0", "must exceed a");
    s.wirtinger_b = numbers(*e, "eigen", "wirtinger_b");
    require_above(s.wirtinger_b, cfg.a, "eigen.wirtinger_b", false);
    if (const auto n = integer(*e, "eigen", "wirtinger_n")) {
      require(*n >= 2 && *n <= 40, "eigen.wirtinger_n", "must lie in [2, 40]");
      s.wirtinger_n = static_cast<int>(*n);
    }
  }

  if (const json* s = find(j, "scan")) {
    reject_unknown(*s, "scan", {"b_grid"});
    cfg.scan.b_grid = numbers(*s, "scan", "b_grid");
    require_above(cfg.scan.b_grid, cfg.a, "scan.b_grid", true);
  }

  if (const json* an = find(j, "analyses")) {
    if (!an->is_array() || an->empty())
      throw ConfigError("analyses", "key analyses: expected a non-empty array of names");
    cfg.analyses.clear();
    for (const auto& name : *an) {
      if (!name.is_string()) throw ConfigError("analyses", "key analyses: expected a non-empty array of names");
      for (Analysis x : parse_analysis(name.get<std::string>()))
        if (!cfg.wants(x)) cfg.analyses.push_back(x);
    }
  }

  if (const json* o = find(j, "outputs")) {
    reject_unknown(*o, "outputs", {"json", "csv", "transform_csv", "scan_csv"});
    cfg.outputs.json = text(*o, "outputs", "json").value_or("");
    cfg.outputs.csv = text(*o, "outputs", "csv").value_or("");
    cfg.outputs.transform_csv = text(*o, "outputs", "transform_csv").value_or("");
    cfg.outputs.scan_csv = text(*o, "outputs", "scan_csv").value_or("");
  }
  return cfg;
}

inline nlohmann::json read_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", "config file " + path + ": " + e.what());
  }
}

inline RunConfig load_config(const std::string& path) { return config_from_json(read_config_json(path)); }

}  // namespace oscil::report
