// SPDX-License-Identifier: MIT
// Run configuration (TOML), sweep rows (CSV) and summaries (JSON).
// Needs the vendored toml.hpp and json.hpp on the include path.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "errors.hpp"
#include "rates.hpp"
#include "scaling.hpp"
#include "suites.hpp"

namespace polylab {

inline constexpr int csv_version = 1;
inline constexpr int summary_version = 1;

struct ClassifyQuery {
  double alpha = 2.0;
  double gamma = 0.0;
  double zeta = pos_inf;
  double h_sign = 1.0;
  bool beta_positive = true;
};

struct OracleQuery {
  long n = 12;
  std::uint64_t seed = 0;
  double alpha = 2.0;
  double p = 0.5;
  double beta_hat = 1.0;
  double h_hat = 1.0;
  double gamma = 0.0;
  double zeta = 0.0;
};

struct RunConfig {
  std::string output_dir = "out";
  std::string name = "sweep";  // stem of the output files
  int threads = 0;             // 0: POLYLAB_THREADS or machine parallelism
  std::optional<SweepConfig> sweep;
  std::optional<ClassifyQuery> classify;
  std::optional<OracleQuery> oracle;
};

// Shortest text that parses back to the same double; "inf" for +infinity.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace detail {

inline double read_real(const toml::table& t, const std::string& key, double fallback) {
  auto node = t[key];
  if (!node) return fallback;
  if (auto v = node.value<double>()) return *v;
  if (auto s = node.value<std::string>()) {
    if (*s == "inf" || *s == "+inf" || *s == "disabled") return pos_inf;
    throw ParameterError("'" + key + "' must be a number or \"inf\", got \"" + *s + "\"");
  }
  throw ParameterError("'" + key + "' must be a number");
}

inline bool read_bool(const toml::table& t, const std::string& key, bool fallback) {
  auto node = t[key];
  if (!node) return fallback;
  if (auto v = node.value<bool>()) return *v;
  throw ParameterError("'" + key + "' must be true or false");
}

inline std::int64_t read_int(const toml::table& t, const std::string& key, std::int64_t fallback) {
  auto node = t[key];
  if (!node) return fallback;
  if (!node.is_integer()) throw ParameterError("'" + key + "' must be an integer");
  return *node.value<std::int64_t>();
}

inline std::string read_string(const toml::table& t, const std::string& key, const std::string& fallback) {
  auto node = t[key];
  if (!node) return fallback;
  if (auto v = node.value<std::string>()) return *v;
  throw ParameterError("'" + key + "' must be a string");
}

inline std::vector<std::int64_t> read_int_list(const toml::table& t, const std::string& key) {
  std::vector<std::int64_t> out;
  auto node = t[key];
  if (!node) return out;
  auto* arr = node.as_array();
  if (!arr) throw ParameterError("'" + key + "' must be an array of integers");
  for (const auto& e : *arr) {
    if (!e.is_integer()) throw ParameterError("'" + key + "' must be an array of integers");
    out.push_back(*e.value<std::int64_t>());
  }
  return out;
}

inline void check_keys(const toml::table& t, const std::string& where, const std::vector<std::string>& known) {
  for (const auto& [k, v] : t) {
    std::string key(k.str());
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParameterError("unknown key '" + key + "' in " + where);
  }
}

// +inf is written as the string "inf"
inline void put_real(toml::table& t, const std::string& key, double x) {
  if (std::isinf(x) && x > 0) t.insert(key, "inf");
  else t.insert(key, x);
}

}  // namespace detail

inline SweepConfig sweep_from_toml(const toml::table& t) {
  detail::check_keys(t, "[sweep]",
                     {"alpha", "beta_hat", "h_hat", "gamma", "zeta", "p", "N_list", "seeds", "checks", "tolerance",
                      "absolute", "pass_fraction", "window_cap", "max_unconverged_fraction", "model", "target"});
  SweepConfig c;
  c.alpha = detail::read_real(t, "alpha", c.alpha);
  c.beta_hat = detail::read_real(t, "beta_hat", c.beta_hat);
  c.h_hat = detail::read_real(t, "h_hat", c.h_hat);
  c.gamma = detail::read_real(t, "gamma", c.gamma);
  c.zeta = detail::read_real(t, "zeta", c.zeta);
  c.p = detail::read_real(t, "p", c.p);
  for (auto n : detail::read_int_list(t, "N_list")) c.n_list.push_back(static_cast<long>(n));
  for (auto s : detail::read_int_list(t, "seeds")) {
    if (s < 0) throw ParameterError("seeds must be >= 0");
    c.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (auto node = t["checks"]) {
    auto* arr = node.as_array();
    if (!arr) throw ParameterError("'checks' must be an array of strings");
    c.checks.clear();
    for (const auto& e : *arr) {
      auto s = e.value<std::string>();
      if (!s) throw ParameterError("'checks' must be an array of strings");
      c.checks.push_back(check_from_name(*s));
    }
  }
  c.tolerance = detail::read_real(t, "tolerance", c.tolerance);
  c.absolute = detail::read_bool(t, "absolute", c.absolute);
  c.pass_fraction = detail::read_real(t, "pass_fraction", c.pass_fraction);
  c.window_cap = detail::read_real(t, "window_cap", c.window_cap);
  c.max_unconverged_fraction = detail::read_real(t, "max_unconverged_fraction", c.max_unconverged_fraction);
  c.model = model_from_name(detail::read_string(t, "model", model_name(c.model)));
  if (t["target"]) c.target = detail::read_real(t, "target", 0.0);
  return c;
}

inline toml::table sweep_to_toml(const SweepConfig& c) {
  toml::table t;
  detail::put_real(t, "alpha", c.alpha);
  detail::put_real(t, "beta_hat", c.beta_hat);
  detail::put_real(t, "h_hat", c.h_hat);
  detail::put_real(t, "gamma", c.gamma);
  detail::put_real(t, "zeta", c.zeta);
  detail::put_real(t, "p", c.p);
  toml::array ns, seeds, checks;
  for (long n : c.n_list) ns.push_back(static_cast<std::int64_t>(n));
  for (auto s : c.seeds) seeds.push_back(static_cast<std::int64_t>(s));
  for (auto ch : c.checks) checks.push_back(check_name(ch));
  t.insert("N_list", ns);
  t.insert("seeds", seeds);
  t.insert("checks", checks);
  detail::put_real(t, "tolerance", c.tolerance);
  t.insert("absolute", c.absolute);
  detail::put_real(t, "pass_fraction", c.pass_fraction);
  detail::put_real(t, "window_cap", c.window_cap);
  detail::put_real(t, "max_unconverged_fraction", c.max_unconverged_fraction);
  t.insert("model", model_name(c.model));
  if (c.target) detail::put_real(t, "target", *c.target);
  return t;
}

inline RunConfig config_from_toml(const toml::table& t) {
  detail::check_keys(t, "the top level", {"output_dir", "name", "threads", "sweep", "classify", "oracle"});
  RunConfig rc;
  rc.output_dir = detail::read_string(t, "output_dir", rc.output_dir);
  rc.name = detail::read_string(t, "name", rc.name);
  rc.threads = static_cast<int>(detail::read_int(t, "threads", rc.threads));
  if (rc.threads < 0) throw ParameterError("threads must be >= 0");
  auto section = [&](const char* key) -> const toml::table* {
    auto node = t[key];
    if (!node) return nullptr;
    if (!node.is_table()) throw ParameterError(std::string("[") + key + "] must be a table");
    return node.as_table();
  };
  if (auto* s = section("sweep")) rc.sweep = sweep_from_toml(*s);
  if (auto* s = section("classify")) {
    detail::check_keys(*s, "[classify]", {"alpha", "gamma", "zeta", "h_sign", "beta_positive"});
    ClassifyQuery q;
    q.alpha = detail::read_real(*s, "alpha", q.alpha);
    q.gamma = detail::read_real(*s, "gamma", q.gamma);
    q.zeta = detail::read_real(*s, "zeta", q.zeta);
    q.h_sign = detail::read_real(*s, "h_sign", q.h_sign);
    q.beta_positive = detail::read_bool(*s, "beta_positive", q.beta_positive);
    rc.classify = q;
  }
  if (auto* s = section("oracle")) {
    detail::check_keys(*s, "[oracle]", {"N", "seed", "alpha", "p", "beta_hat", "h_hat", "gamma", "zeta"});
    OracleQuery q;
    q.n = static_cast<long>(detail::read_int(*s, "N", q.n));
    auto seed = detail::read_int(*s, "seed", 0);
    if (seed < 0) throw ParameterError("seed must be >= 0");
    q.seed = static_cast<std::uint64_t>(seed);
    q.alpha = detail::read_real(*s, "alpha", q.alpha);
    q.p = detail::read_real(*s, "p", q.p);
    q.beta_hat = detail::read_real(*s, "beta_hat", q.beta_hat);
    q.h_hat = detail::read_real(*s, "h_hat", q.h_hat);
    q.gamma = detail::read_real(*s, "gamma", q.gamma);
    q.zeta = detail::read_real(*s, "zeta", q.zeta);
    rc.oracle = q;
  }
  return rc;
}

inline RunConfig parse_config(const std::string& text, const std::string& source = "config") {
  try {
    return config_from_toml(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ": " << e.description();
    throw ParameterError(os.str());
  }
}

inline RunConfig load_config(const std::string& path) {
  try {
    return config_from_toml(toml::parse_file(path));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path << ":" << e.source().begin.line << ": " << e.description();
    throw ParameterError(os.str());
  }
}

inline std::string serialize_config(const RunConfig& rc) {
  toml::table t;
  t.insert("output_dir", rc.output_dir);
  t.insert("name", rc.name);
  t.insert("threads", static_cast<std::int64_t>(rc.threads));
  if (rc.sweep) t.insert("sweep", sweep_to_toml(*rc.sweep));
  if (rc.classify) {
    toml::table q;
    detail::put_real(q, "alpha", rc.classify->alpha);
    detail::put_real(q, "gamma", rc.classify->gamma);
    detail::put_real(q, "zeta", rc.classify->zeta);
    detail::put_real(q, "h_sign", rc.classify->h_sign);
    q.insert("beta_positive", rc.classify->beta_positive);
    t.insert("classify", q);
  }
  if (rc.oracle) {
    toml::table q;
    q.insert("N", static_cast<std::int64_t>(rc.oracle->n));
    q.insert("seed", static_cast<std::int64_t>(rc.oracle->seed));
    detail::put_real(q, "alpha", rc.oracle->alpha);
    detail::put_real(q, "p", rc.oracle->p);
    detail::put_real(q, "beta_hat", rc.oracle->beta_hat);
    detail::put_real(q, "h_hat", rc.oracle->h_hat);
    detail::put_real(q, "gamma", rc.oracle->gamma);
    detail::put_real(q, "zeta", rc.oracle->zeta);
    t.insert("oracle", q);
  }
  std::ostringstream os;
  os << t << "\n";
  return os.str();
}

inline nlohmann::json label_json(const RegionLabel& l) {
  nlohmann::json j;
  j["region"] = region_name(l.region);
  j["xi"] = l.xi;
  j["theta"] = l.theta;
  j["limit"] = l.descriptor;
  if (!l.adjacent.empty()) {
    auto& a = j["adjacent"] = nlohmann::json::array();
    for (auto r : l.adjacent) a.push_back(region_name(r));
  }
  return j;
}

inline const char* sweep_csv_columns =
    "region,alpha,gamma,zeta,beta_hat,h_hat,N,seed,log_Z,normalized,target,variational_value,window_A,unconverged_flag,"
    "neglected";

inline void write_sweep_csv(const ScalingReport& r, std::ostream& os) {
  const auto& c = r.config;
  os << "# polylab sweep csv v" << csv_version << "\n" << sweep_csv_columns << "\n";
  for (const auto& row : r.rows) {
    os << region_name(r.label.region) << ',' << format_number(c.alpha) << ',' << format_number(c.gamma) << ','
       << format_number(c.zeta) << ',' << format_number(c.beta_hat) << ',' << format_number(c.h_hat) << ',' << row.n
       << ',' << row.seed << ',' << format_number(row.log_z) << ',' << format_number(row.normalized) << ','
       << format_number(row.target) << ',' << (row.variational ? format_number(*row.variational) : "") << ','
       << format_number(row.window) << ',' << (row.unconverged ? 1 : 0) << ',' << format_number(row.neglected) << "\n";
  }
}

inline nlohmann::json extrapolation_json(const Extrapolation& e) {
  return {{"limit", e.limit}, {"model", model_name(e.model)}, {"theta", e.theta}, {"residual", e.residual}, {"failed", e.failed}};
}

inline nlohmann::json sweep_summary_json(const ScalingReport& r) {
  const auto& c = r.config;
  nlohmann::json j;
  j["format"] = "polylab sweep summary";
  j["version"] = summary_version;
  j["label"] = label_json(r.label);
  j["config"] = {{"alpha", c.alpha},
                 {"beta_hat", c.beta_hat},
                 {"h_hat", c.h_hat},
                 {"gamma", format_number(c.gamma)},
                 {"zeta", format_number(c.zeta)},
                 {"p", c.p},
                 {"N_list", c.n_list},
                 {"seeds", c.seeds},
                 {"tolerance", c.tolerance},
                 {"absolute", c.absolute || r.label.region == Region::R1},
                 {"pass_fraction", c.pass_fraction},
                 {"max_unconverged_fraction", c.max_unconverged_fraction}};
  if (r.theta_fit) j["logZ_exponent_fit"] = {{"theta", r.theta_fit->theta}, {"stderr", r.theta_fit->std_error}};
  if (r.spread_fit) j["spread_exponent_fit"] = {{"chi", r.spread_fit->theta}, {"stderr", r.spread_fit->std_error}};
  if (r.limit) j["limit"] = extrapolation_json(*r.limit);
  j["target"] = r.target ? nlohmann::json(*r.target) : nlohmann::json("same-environment variational value");
  auto& seeds = j["seeds"] = nlohmann::json::array();
  for (const auto& o : r.outcomes) {
    nlohmann::json s{{"seed", o.seed}, {"value", o.value}, {"target", o.target}, {"pass", o.pass}};
    if (o.fit.model != ExtrapolationModel::raw || o.fit.failed) s["fit"] = extrapolation_json(o.fit);
    seeds.push_back(s);
  }
  j["passed"] = r.passed;
  j["required"] = r.required;
  j["unconverged"] = r.unconverged;
  j["rows"] = r.rows.size();
  j["verdict"] = r.verdict();
  return j;
}

inline nlohmann::json xi_json(const XiReport& x) {
  nlohmann::json j{{"N", x.n}, {"epsilon", x.epsilon}, {"pass", x.pass}};
  auto& a = j["checks"] = nlohmann::json::array();
  for (const auto& c : x.checks)
    a.push_back({{"name", c.name}, {"seed", c.seed}, {"value", c.value}, {"threshold", c.threshold},
                 {"kind", c.upper ? "at most" : "at least"}, {"pass", c.pass}});
  return j;
}

inline nlohmann::json ldp_json(const LdpReport& r) {
  nlohmann::json j{{"xi", r.xi}, {"u", r.u}, {"v", r.v}, {"rate", r.rate}, {"target", r.target},
                   {"extrapolation", extrapolation_json(r.fit)}, {"rel_error", r.rel_error}, {"tolerance", r.tolerance},
                   {"pass", r.pass}};
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) rows.push_back({{"N", row.n}, {"neg_log_p", row.neg_log_p}, {"normalized", row.normalized}});
  return j;
}

inline nlohmann::json criterion_json(const CriterionResult& r) {
  return {{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}};
}

}  // namespace polylab
