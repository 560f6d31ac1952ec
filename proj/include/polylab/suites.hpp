// SPDX-License-Identifier: MIT
// Validation batteries: one result line per acceptance item.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "env.hpp"
#include "errors.hpp"
#include "polymer.hpp"
#include "rates.hpp"
#include "scaling.hpp"
#include "srw_exact.hpp"

namespace polylab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

inline std::string sweep_summary(const ScalingReport& r) {
  std::ostringstream os;
  os << region_name(r.label.region) << " " << r.passed << "/" << r.outcomes.size() << " seeds within tolerance";
  if (r.limit) os << ", mean limit " << fmt("%.6g", r.limit->limit) << " (" << model_name(r.limit->model) << ")";
  if (r.target) os << ", target " << fmt("%.7g", *r.target);
  if (r.unconverged) os << ", " << r.unconverged << " unconverged windows";
  return os.str();
}

inline SweepConfig sweep(double gamma, double zeta, double h_hat, std::vector<long> ns, int seeds) {
  SweepConfig c;
  c.alpha = 2.0;
  c.beta_hat = 1.0;
  c.h_hat = h_hat;
  c.gamma = gamma;
  c.zeta = zeta;
  c.n_list = std::move(ns);
  for (int s = 0; s < seeds; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
  return c;
}

inline std::vector<long> powers_of_two(int from, int to, int step = 1) {
  std::vector<long> out;
  for (int k = from; k <= to; k += step) out.push_back(1L << k);
  return out;
}

inline double worst_check(const XiReport& x, const std::string& name, bool upper) {
  double w = upper ? 0.0 : 1.0;
  for (const auto& c : x.checks)
    if (c.name == name) w = upper ? std::max(w, c.value) : std::min(w, c.value);
  return w;
}

inline bool checks_pass(const XiReport& x, const std::string& name) {
  for (const auto& c : x.checks)
    if (c.name == name && !c.pass) return false;
  return true;
}

}  // namespace detail

// 50 random draws with N <= 16 against path enumeration.
inline CriterionResult criterion_oracle() {
  CriterionResult r{1, "oracle equivalence"};
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_z = 0.0, worst_cell = 0.0;
  int draws = 0;
  for (double alpha : {2.0, 1.5, 0.7})
    for (int i = 0; i < 17; ++i) {
      PolymerParams p;
      p.alpha = alpha;
      p.n = 1 + static_cast<long>(rng() % 16);
      p.beta_hat = 2.0 * u(rng);
      p.h_hat = 4.0 * u(rng) - 2.0;
      p.gamma = u(rng) < 0.15 ? pos_inf : 2.0 * u(rng) - 1.0;
      p.zeta = u(rng) < 0.15 ? pos_inf : 2.0 * u(rng) - 1.0;
      auto env = make_environment({alpha, 0.7, rng()});
      double ref = oracle_log_partition(env, p);
      worst_z = std::max(worst_z, std::fabs(log_partition(env, p) - ref) / std::max(1.0, std::fabs(ref)));
      auto law = oracle_cell_law(env, p);
      std::map<std::pair<long, long>, double> cells;
      std::map<long, double> ends;
      for (auto& [k, v] : law) {
        cells[{std::get<0>(k), std::get<1>(k)}] += v;
        ends[std::get<2>(k)] += v;
      }
      auto m = polymer_range_marginal(env, p);
      for (auto& [k, v] : cells) worst_cell = std::max(worst_cell, std::fabs(std::exp(m.log_at(k.first, k.second)) - v));
      for (const auto& c : m.cells)
        if (!cells.count({c.a, c.b})) worst_cell = std::max(worst_cell, std::exp(c.log_prob));
      auto e = polymer_endpoint_marginal(env, p, EndpointMethod::per_cell);
      for (long x = -p.n; x <= p.n; ++x) worst_cell = std::max(worst_cell, std::fabs(e.at(x) - (ends.count(x) ? ends[x] : 0.0)));
      ++draws;
    }
  r.pass = draws >= 50 && worst_z <= 1e-12 && worst_cell <= 1e-10;
  r.detail = std::to_string(draws) + " draws, worst log Z rel " + detail::fmt("%.2e", worst_z) + ", worst cell " +
             detail::fmt("%.2e", worst_cell);
  return r;
}

inline CriterionResult criterion_dp_spectral() {
  CriterionResult r{2, "confined survival: transfer matrix vs spectral"};
  double worst = 0.0;
  for (long n = 0; n <= 64; ++n)
    for (long w = 1; w <= 12; ++w) {
      auto d = confined_survival_dp_all(n, w);
      auto s = confined_survival_spectral_all(n, w);
      for (long i = 0; i <= w; ++i) worst = std::max(worst, std::fabs(std::expm1(s[static_cast<std::size_t>(i)] - d[static_cast<std::size_t>(i)])));
    }
  r.pass = worst <= 1e-12;
  r.detail = "N <= 64, width <= 12, all starts, worst rel " + detail::fmt("%.2e", worst);
  return r;
}

inline CriterionResult criterion_r6() {
  CriterionResult r{3, "R6 limit -2h and two-site range"};
  auto c = detail::sweep(0.0, -2.0, 1.0, {1000}, 10);
  c.tolerance = 1e-3;
  c.absolute = true;
  auto rep = run_logz_sweep(c);
  double worst_mass = 1.0;
  WalkKernel k(1000);
  for (auto s : c.seeds) {
    auto m = polymer_range_marginal(sweep_environment(c, s), c.params(1000), k);
    worst_mass = std::min(worst_mass, m.mass([](long a, long b) { return a + b == 1; }));
  }
  double worst = 0.0;
  for (const auto& o : rep.outcomes) worst = std::max(worst, std::fabs(o.value - o.target));
  r.pass = rep.pass && rep.passed == 10 && worst_mass >= 0.999;
  r.detail = detail::sweep_summary(rep) + "; max |N^zeta log Z + 2| " + detail::fmt("%.2e", worst) +
             ", min mass on |R|=2 " + detail::fmt("%.6f", worst_mass);
  return r;
}

inline CriterionResult criterion_r5() {
  CriterionResult r{4, "R5 limit and range width"};
  auto c = detail::sweep(0.2, 0.0, 1.0, detail::powers_of_two(10, 17), 3);
  c.target = -3.2174514;
  auto rep = run_logz_sweep(c);
  auto x = run_xi_check(c);
  bool width = detail::checks_pass(x, "range_width");
  r.pass = rep.pass && width;
  r.detail = detail::sweep_summary(rep) + "; min width mass " + detail::fmt("%.4f", detail::worst_check(x, "range_width", false)) +
             " at N=" + std::to_string(x.n);
  return r;
}

inline CriterionResult criterion_r4t() {
  CriterionResult r{5, "R4~ limit h^2/2"};
  auto c = detail::sweep(0.6, 0.25, -1.0, detail::powers_of_two(9, 12), 3);
  c.tolerance = 0.10;
  auto rep = run_logz_sweep(c);
  r.pass = rep.pass;
  r.detail = detail::sweep_summary(rep);
  return r;
}

inline CriterionResult criterion_boundary() {
  CriterionResult r{6, "R4~/R5~ boundary limit and velocity"};
  auto c = detail::sweep(0.5, 0.0, -1.0, detail::powers_of_two(7, 10), 3);
  c.target = 0.1614394;
  auto rep = run_logz_sweep(c);
  auto x = run_xi_check(c);
  bool vel = detail::checks_pass(x, "endpoint_velocity");
  r.pass = rep.pass && vel;
  double lc = closed_form_limit(Region::BoundaryR4tR5t, 1.0, -1.0).value;
  r.detail = detail::sweep_summary(rep) + "; min velocity mass " +
             detail::fmt("%.4f", detail::worst_check(x, "endpoint_velocity", false)) + " at N=" + std::to_string(x.n);
  if (rep.limit)
    r.detail += "; against log cosh 1 = " + detail::fmt("%.7f", lc) + " the limit is off by " +
                detail::fmt("%.2e", std::fabs(rep.limit->limit - lc) / lc) + " rel";
  return r;
}

inline CriterionResult criterion_r1() {
  CriterionResult r{7, "R1: Z -> 1 and diffusive endpoint"};
  auto c = detail::sweep(0.5, 1.0, 1.0, {1L << 14}, 20);
  c.tolerance = 0.05;
  c.pass_fraction = 0.9;
  auto rep = run_logz_sweep(c);
  auto x = run_xi_check(c);
  std::size_t ks_ok = 0;
  for (const auto& ch : x.checks) ks_ok += ch.name == "endpoint_ks" && ch.pass;
  r.pass = rep.pass && ks_ok == c.seeds.size();
  r.detail = std::to_string(rep.passed) + "/20 seeds with Z in [0.95,1.05]; " + std::to_string(ks_ok) +
             "/20 seeds with endpoint KS <= 0.02 (max " + detail::fmt("%.4f", detail::worst_check(x, "endpoint_ks", true)) + ")";
  return r;
}

inline CriterionResult criterion_coupling() {
  CriterionResult r{8, "R2/R3/R4 against same-environment variational values"};
  struct Case {
    const char* name;
    double gamma, zeta;
  };
  r.pass = true;
  for (auto cs : {Case{"R3", -0.6, 10.0}, Case{"R2", 0.0, 10.0}, Case{"R4", -0.3, 0.0}}) {
    auto c = detail::sweep(cs.gamma, cs.zeta, 1.0, {1L << 12}, 10);
    c.tolerance = 0.10;
    c.pass_fraction = 0.8;
    auto rep = run_logz_sweep(c);
    r.pass = r.pass && rep.pass;
    double mean_gap = 0.0;
    for (const auto& o : rep.outcomes) mean_gap += (o.target - o.value) / 10.0;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += std::string(cs.name) + " " + std::to_string(rep.passed) + "/10 (mean W - N^-theta log Z = " +
                detail::fmt("%.3f", mean_gap) + ")";
  }
  return r;
}

inline CriterionResult criterion_ldp() {
  CriterionResult r{9, "walk LDP rates"};
  std::vector<long> cubes;
  for (long m = 8; m <= 40; m += 4) cubes.push_back(m * m * m);
  auto fold = run_ldp_validation(1.0 / 3.0, -1.0, 1.0, cubes, 0.03);
  auto stretch = run_ldp_validation(0.6, 0.0, 1.0, detail::powers_of_two(10, 40, 3), 0.10);
  auto lin = run_ldp_validation(1.0, 0.0, 0.5, detail::powers_of_two(8, 24, 2), 0.05);
  const double kappa_half = 0.1307823;
  double lin_err = std::fabs(lin.fit.limit - kappa_half) / kappa_half;
  r.pass = fold.pass && stretch.pass && lin_err <= 0.05;
  r.detail = "folding " + detail::fmt("%.6f", fold.fit.limit) + " vs " + detail::fmt("%.7f", fold.target) + " (" +
             detail::fmt("%.2e", fold.rel_error) + " rel); stretching " + detail::fmt("%.6f", stretch.fit.limit) +
             " vs 0.5 (" + detail::fmt("%.2e", stretch.rel_error) + "); linear " + detail::fmt("%.7f", lin.fit.limit) +
             " vs " + detail::fmt("%.7f", kappa_half) + " (" + detail::fmt("%.2e", lin_err) + ")";
  return r;
}

inline CriterionResult criterion_distributional() {
  CriterionResult r{10, "one-sided variational laws"};
  auto a = run_distributional(Variant::R3, 1.0, 1.0, 2000, 0);
  auto b = run_distributional(Variant::R4, 1.0, 1.0, 2000, 1);
  r.pass = a.pass && b.pass;
  r.detail = "W~R3 vs half-normal KS " + detail::fmt("%.4f", a.ks) + ", W~R4 vs Exp(2) KS " + detail::fmt("%.4f", b.ks) +
             " (2000 seeds each, " + std::to_string(a.unconverged + b.unconverged) + " unconverged)";
  return r;
}

inline CriterionResult criterion_tails() {
  CriterionResult r{11, "maximal partial sum tails, alpha = 1.5"};
  const DisorderSpec spec{1.5, 0.5, 31};
  auto s = omega_star_samples(spec, 8, 1000000);
  std::vector<Point> pts;
  for (double t : {160.0, 320.0, 640.0, 1280.0, 2560.0}) pts.push_back({t, tail_fraction(s, t).estimate});
  auto fit = fit_exponent(pts);
  double worst = 0.0;
  for (std::size_t l : {8u, 32u, 128u}) {
    auto sl = omega_star_samples(spec, l, 100000);
    for (double t : {10.0, 40.0, 160.0})
      worst = std::max(worst, tail_fraction(sl, t).estimate * std::pow(t, spec.alpha) / static_cast<double>(l));
  }
  r.pass = std::fabs(fit.theta + 1.5) <= 0.15 && worst <= 10.0;
  r.detail = "slope " + detail::fmt("%.3f", fit.theta) + " +- " + detail::fmt("%.3f", fit.std_error) +
             " (l = 8, T = 160..2560); max P T^alpha / l over {8,32,128}x{10,40,160} = " + detail::fmt("%.3f", worst) +
             " (bound 10)";
  return r;
}

inline CriterionResult criterion_classifier() {
  CriterionResult r{12, "classifier partition and xi continuity"};
  struct Case {
    Diagram d;
    double alpha, h_sign;
  };
  std::vector<Case> cases{{Diagram::Fig1, 2.0, 1},    {Diagram::Fig1, 1.5, 1},  {Diagram::Fig2, 0.75, 1},
                          {Diagram::Fig3, 0.3, 1},    {Diagram::Fig3, 0.5, 1},  {Diagram::Fig4, 2.0, -1},
                          {Diagram::Fig4, 0.75, -1},  {Diagram::Fig5, 0.3, -1}};
  const int grid = 317;
  long checked = 0, bad = 0;
  std::size_t boundaries = 0;
  std::vector<std::string> jumps;
  for (const auto& cs : cases) {
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        double g = -4.0 + 8.0 * (i + 0.5) / grid, z = -4.0 + 8.0 * (j + 0.5) / grid;
        bool off = true;
        for (const auto& c : detail::region_table(cs.d, cs.alpha, g, z))
          for (double m : c.margins)
            if (std::fabs(m) < 1e-9) off = false;
        if (!off) continue;
        ++checked;
        auto acc = accepting_regions(cs.d, cs.alpha, g, z);
        if (acc.size() != 1 || classify_region(cs.alpha, g, z, cs.h_sign).region != acc.front()) ++bad;
      }
    for (auto [pr, jump] : boundary_xi_jumps(cs.d, cs.alpha)) {
      ++boundaries;
      if (jump > 1e-12)
        jumps.push_back(region_name(pr.first) + "/" + region_name(pr.second) + "@alpha=" + detail::fmt("%g", cs.alpha) +
                        (cs.h_sign < 0 ? ",h<0" : "") + " (" + detail::fmt("%.3g", jump) + ")");
    }
  }
  r.pass = bad == 0 && jumps.empty();
  r.detail = std::to_string(checked) + " off-boundary points, " + std::to_string(bad) + " without a unique region; " +
             std::to_string(boundaries - jumps.size()) + "/" + std::to_string(boundaries) + " sampled boundaries continuous";
  if (!jumps.empty()) {
    r.detail += "; xi jumps on";
    for (const auto& s : jumps) r.detail += " " + s;
  }
  return r;
}

inline const std::map<int, std::function<CriterionResult()>>& criteria() {
  static const std::map<int, std::function<CriterionResult()>> table{
      {1, criterion_oracle},   {2, criterion_dp_spectral}, {3, criterion_r6},     {4, criterion_r5},
      {5, criterion_r4t},      {6, criterion_boundary},    {7, criterion_r1},     {8, criterion_coupling},
      {9, criterion_ldp},      {10, criterion_distributional}, {11, criterion_tails}, {12, criterion_classifier}};
  return table;
}

inline std::vector<int> suite_members(const std::string& suite) {
  if (suite == "oracle") return {1, 2};
  if (suite == "regions") return {3, 4, 5, 6, 7, 8, 12};
  if (suite == "ldp") return {9};
  if (suite == "distributional") return {10, 11};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  throw ParameterError("unknown suite '" + suite + "' (oracle, regions, ldp, distributional, all)");
}

inline CriterionResult run_criterion(int id) {
  auto it = criteria().find(id);
  if (it == criteria().end()) throw ParameterError("no criterion " + std::to_string(id));
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = it->second();
  } catch (const std::exception& e) {
    r.id = id;
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (id == 1 && r.seconds >= 60.0) {
    r.pass = false;
    r.detail += "; over the one-minute budget";
  }
  return r;
}

inline std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "criterion %2d %s  [%7.1fs] ", r.id, r.pass ? "PASS" : "FAIL", r.seconds);
  return head + r.title + ": " + r.detail;
}

}  // namespace polylab
