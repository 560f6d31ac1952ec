// polylab: phase-diagram classification, N sweeps, oracle checks and
// validation batteries for the random-walk range polymer.
//
// exit codes: 0 success, 1 validation failure, 2 usage or parameter error,
// 3 numerical convergence failure
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polylab/io.hpp"

namespace fs = std::filesystem;
using namespace polylab;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0, exit_fail = 1, exit_usage = 2, exit_convergence = 3;

double parse_real(const std::string& s, const char* what) {
  if (s == "inf" || s == "+inf" || s == "disabled") return pos_inf;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParameterError(std::string(what) + " must be a number or inf, got '" + s + "'");
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ParameterError("cannot write " + p.string());
  f << text;
}

int cmd_classify(const ClassifyQuery& q) {
  auto l = classify_region(q.alpha, q.gamma, q.zeta, q.h_sign, q.beta_positive);
  std::cout << label_json(l).dump() << "\n";
  return exit_ok;
}

int cmd_oracle(const OracleQuery& q) {
  if (q.n > 16) throw ParameterError("oracle runs are limited to N <= 16");
  PolymerParams p{q.alpha, q.beta_hat, q.h_hat, q.gamma, q.zeta, q.n};
  p.validate();
  auto env = make_environment({q.alpha, q.p, q.seed});
  double engine = log_partition(env, p), oracle = oracle_log_partition(env, p);
  double rel = std::fabs(engine - oracle) / std::max(1.0, std::fabs(oracle));
  std::cout << json{{"engine", engine}, {"oracle", oracle}, {"rel_diff", rel}}.dump() << "\n";
  return exit_ok;
}

int cmd_sweep(const RunConfig& rc) {
  if (!rc.sweep) throw ParameterError("the config has no [sweep] table");
  const auto& c = *rc.sweep;
  c.validate();
  bool logz = c.wants(Check::logz_limit) || c.wants(Check::variational_coupling);
  ScalingReport rep;
  json summary;
  if (logz) {
    rep = run_logz_sweep(c);
    summary = sweep_summary_json(rep);
  } else {
    summary = {{"format", "polylab sweep summary"}, {"version", summary_version}, {"label", label_json(c.label())}};
  }
  bool ok = !logz || rep.pass;
  if (c.wants(Check::xi_histogram)) {
    auto x = run_xi_check(c);
    summary["xi_check"] = xi_json(x);
    ok = ok && x.pass;
  }
  for (auto [check, id] : {std::pair{Check::ldp, 9}, std::pair{Check::distributional, 10}})
    if (c.wants(check)) {
      auto r = run_criterion(id);
      summary[check_name(check)] = criterion_json(r);
      ok = ok && r.pass;
    }
  summary["overall"] = ok ? "pass" : (logz && rep.convergence_failure ? "unconverged" : "fail");

  fs::create_directories(rc.output_dir);
  fs::path dir(rc.output_dir);
  if (logz) {
    std::ostringstream csv;
    write_sweep_csv(rep, csv);
    write_file(dir / (rc.name + ".csv"), csv.str());
  }
  write_file(dir / (rc.name + ".summary.json"), summary.dump(2) + "\n");
  std::cout << summary["overall"].get<std::string>() << ": " << (dir / (rc.name + ".summary.json")).string() << "\n";
  if (logz && rep.convergence_failure) return exit_convergence;
  return ok ? exit_ok : exit_fail;
}

int cmd_validate(const std::string& suite, const std::string& out_dir) {
  auto ids = suite_members(suite);
  json report{{"format", "polylab validation report"}, {"version", summary_version}, {"suite", suite}};
  auto& items = report["criteria"] = json::array();
  bool ok = true;
  for (int id : ids) {
    auto r = run_criterion(id);
    std::cout << format_result(r) << std::endl;
    items.push_back(criterion_json(r));
    ok = ok && r.pass;
  }
  report["pass"] = ok;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / ("validate_" + suite + ".json"), report.dump(2) + "\n");
  }
  return ok ? exit_ok : exit_fail;
}

int cmd_ldp(double xi, double u, double v, const std::vector<long>& ns, double tol) {
  auto r = run_ldp_validation(xi, u, v, ns, tol);
  std::cout << ldp_json(r).dump(2) << "\n";
  return r.pass ? exit_ok : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polylab: random-walk range polymer in a heavy-tailed environment"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: POLYLAB_THREADS or all cores)")->check(CLI::NonNegativeNumber);

  auto* classify = app.add_subcommand("classify", "phase-diagram region and exponents as JSON");
  std::string alpha_s = "2", gamma_s = "0", zeta_s = "inf";
  double h_sign = 1.0;
  bool no_beta = false;
  classify->add_option("--alpha", alpha_s, "tail index in (0,1) or (1,2]")->required();
  classify->add_option("--gamma", gamma_s, "disorder decay exponent, or inf");
  classify->add_option("--zeta", zeta_s, "field decay exponent, or inf");
  classify->add_option("--h-sign", h_sign, "sign of the field (-1, 0, 1)");
  classify->add_flag("--no-disorder", no_beta, "beta_hat = 0");

  auto* sweep = app.add_subcommand("sweep", "normalized log Z along N; CSV rows and a JSON summary");
  std::string config_path, out_dir;
  sweep->add_option("config", config_path, "TOML run configuration")->required();
  sweep->add_option("--out", out_dir, "output directory (overrides the config)");

  auto* oracle = app.add_subcommand("oracle", "engine against full path enumeration, N <= 16");
  OracleQuery oq;
  std::string o_gamma = "0", o_zeta = "0", o_alpha = "2";
  oracle->add_option("--n", oq.n, "walk length")->required();
  oracle->add_option("--seed", oq.seed, "environment seed");
  oracle->add_option("--alpha", o_alpha, "tail index");
  oracle->add_option("--p", oq.p, "positive-tail weight");
  oracle->add_option("--beta-hat", oq.beta_hat, "disorder strength");
  oracle->add_option("--h-hat", oq.h_hat, "field strength");
  oracle->add_option("--gamma", o_gamma, "disorder decay exponent, or inf");
  oracle->add_option("--zeta", o_zeta, "field decay exponent, or inf");

  auto* validate = app.add_subcommand("validate", "run a validation battery");
  std::string suite, v_out;
  validate->add_option("suite", suite, "oracle, regions, ldp, distributional or all")->required();
  validate->add_option("--out", v_out, "directory for the JSON report");

  auto* ldp = app.add_subcommand("ldp", "walk large-deviation rate against exact probabilities");
  double xi = 1.0 / 3.0, u = -1.0, v = 1.0, tol = 0.05;
  std::vector<long> ns;
  ldp->add_option("--xi", xi, "scale exponent (not 1/2)")->required();
  ldp->add_option("--u", u, "lower level, <= 0");
  ldp->add_option("--v", v, "upper level, >= 0");
  ldp->add_option("--n-list", ns, "walk lengths")->delimiter(',')->required();
  ldp->add_option("--tolerance", tol, "relative tolerance on the extrapolated value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (threads > 0) set_thread_budget(threads);
    if (*classify) {
      ClassifyQuery q;
      q.alpha = parse_real(alpha_s, "--alpha");
      q.gamma = parse_real(gamma_s, "--gamma");
      q.zeta = parse_real(zeta_s, "--zeta");
      q.h_sign = h_sign;
      q.beta_positive = !no_beta;
      return cmd_classify(q);
    }
    if (*sweep) {
      auto rc = load_config(config_path);
      if (!out_dir.empty()) rc.output_dir = out_dir;
      if (threads == 0 && rc.threads > 0) set_thread_budget(rc.threads);
      return cmd_sweep(rc);
    }
    if (*oracle) {
      oq.alpha = parse_real(o_alpha, "--alpha");
      oq.gamma = parse_real(o_gamma, "--gamma");
      oq.zeta = parse_real(o_zeta, "--zeta");
      return cmd_oracle(oq);
    }
    if (*validate) return cmd_validate(suite, v_out);
    if (*ldp) return cmd_ldp(xi, u, v, ns, tol);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return exit_convergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
