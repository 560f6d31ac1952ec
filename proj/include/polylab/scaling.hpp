// SPDX-License-Identifier: MIT
// Sweeps over N: normalized log Z against closed-form or same-environment
// variational targets, range and endpoint concentration, walk LDP checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "env.hpp"
#include "errors.hpp"
#include "logmath.hpp"
#include "parallel.hpp"
#include "polymer.hpp"
#include "rates.hpp"
#include "srw_exact.hpp"
#include "varsolve.hpp"

namespace polylab {

using Point = std::pair<double, double>;  // (N, value)

struct ExponentFit {
  double theta = 0.0;
  double std_error = 0.0;
};

// Least-squares slope of log value against log N.
inline ExponentFit fit_exponent(const std::vector<Point>& pts) {
  if (pts.size() < 3) throw ParameterError("fit_exponent needs at least 3 points");
  double m = static_cast<double>(pts.size()), sx = 0.0, sy = 0.0;
  for (auto [n, y] : pts) {
    if (!(n > 0.0) || !(y > 0.0) || !std::isfinite(y)) throw ParameterError("fit_exponent needs positive values");
    sx += std::log(n);
    sy += std::log(y);
  }
  double mx = sx / m, my = sy / m, sxx = 0.0, sxy = 0.0;
  for (auto [n, y] : pts) {
    double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("fit_exponent needs distinct N");
  ExponentFit f;
  f.theta = sxy / sxx;
  double rss = 0.0;
  for (auto [n, y] : pts) {
    double r = std::log(y) - my - f.theta * (std::log(n) - mx);
    rss += r * r;
  }
  f.std_error = pts.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  return f;
}

enum class ExtrapolationModel { power_correction, inv_log, raw };

inline std::string model_name(ExtrapolationModel m) {
  switch (m) {
    case ExtrapolationModel::power_correction: return "power_correction";
    case ExtrapolationModel::inv_log: return "inv_log";
    case ExtrapolationModel::raw: return "raw";
  }
  return "?";
}

inline ExtrapolationModel model_from_name(const std::string& s) {
  for (auto m : {ExtrapolationModel::power_correction, ExtrapolationModel::inv_log, ExtrapolationModel::raw})
    if (model_name(m) == s) return m;
  throw ParameterError("unknown extrapolation model '" + s + "'");
}

struct Extrapolation {
  double limit = 0.0;
  double residual = 0.0;  // root of the residual sum of squares
  double theta = 0.0;     // correction exponent (power model only)
  ExtrapolationModel model = ExtrapolationModel::raw;
  bool failed = false;    // raw last value returned
};

namespace detail {

struct LinearFit {
  double c0 = 0.0, c1 = 0.0, rss = pos_inf;
};

// value ~ c0 + c1 x
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double m = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / m, my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  if (!(sxx > 0.0) || !std::isfinite(sxx)) return f;
  f.c1 = sxy / sxx;
  f.c0 = my - f.c1 * mx;
  f.rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.c0 - f.c1 * x[i];
    f.rss += r * r;
  }
  return f;
}

inline LinearFit power_fit(const std::vector<Point>& pts, double theta) {
  std::vector<double> x, y;
  for (auto [n, v] : pts) {
    x.push_back(std::pow(n, -theta));
    y.push_back(v);
  }
  return linear_fit(x, y);
}

inline constexpr double theta_min = 0.02, theta_max = 3.0;

}  // namespace detail

// Limit of value(N) from c0 + c1 N^{-theta} with theta free, or c0 + c1 / log N.
// The power fit falls back to the log model when its best exponent sits at the
// lower end of the scan, where the two cannot be told apart.
inline Extrapolation extrapolate(std::vector<Point> pts,
                                 ExtrapolationModel model = ExtrapolationModel::power_correction) {
  if (pts.size() < 4) throw ParameterError("extrapolate needs at least 4 points");
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i].first > pts[i - 1].first)) throw ParameterError("extrapolate needs distinct N");
  for (auto [n, v] : pts)
    if (!(n > 1.0) || !std::isfinite(v)) throw ParameterError("extrapolate needs N > 1 and finite values");
  Extrapolation out;
  out.limit = pts.back().second;
  if (model == ExtrapolationModel::raw) return out;

  double lo = pts.front().second, hi = lo, scale = 0.0;
  for (auto [n, v] : pts) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    scale = std::max(scale, std::fabs(v));
  }
  if (hi - lo <= 1e-14 * std::max(1.0, scale)) {
    out.model = model;
    return out;
  }

  std::vector<double> x, y;
  for (auto [n, v] : pts) {
    x.push_back(1.0 / std::log(n));
    y.push_back(v);
  }
  auto lf = detail::linear_fit(x, y);
  bool log_ok = std::isfinite(lf.c0) && std::isfinite(lf.rss);

  if (model == ExtrapolationModel::power_correction) {
    double best_t = detail::theta_min;
    auto best = detail::power_fit(pts, best_t);
    const int steps = 299;
    for (int i = 1; i <= steps; ++i) {
      double t = detail::theta_min + (detail::theta_max - detail::theta_min) * i / steps;
      auto f = detail::power_fit(pts, t);
      if (f.rss < best.rss) {
        best = f;
        best_t = t;
      }
    }
    // golden-section refinement inside the neighbouring grid cells
    double h = (detail::theta_max - detail::theta_min) / steps;
    double a = std::max(detail::theta_min, best_t - h), b = std::min(detail::theta_max, best_t + h);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto rss = [&](double t) { return detail::power_fit(pts, t).rss; };
    double c = b - g * (b - a), d = a + g * (b - a), fc = rss(c), fd = rss(d);
    for (int it = 0; it < 60; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = rss(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = rss(d);
      }
    }
    double t = 0.5 * (a + b);
    auto f = detail::power_fit(pts, t);
    if (f.rss <= best.rss) {
      best = f;
      best_t = t;
    }
    // a three-parameter fit that does no better than the log model is not trusted
    bool degenerate = !std::isfinite(best.c0) || !std::isfinite(best.rss) || best_t <= detail::theta_min + h ||
                      (log_ok && lf.rss <= best.rss);
    if (!degenerate) {
      out.limit = best.c0;
      out.residual = std::sqrt(best.rss);
      out.theta = best_t;
      out.model = ExtrapolationModel::power_correction;
      return out;
    }
  }

  if (!log_ok) {
    out.failed = true;
    return out;
  }
  out.limit = lf.c0;
  out.residual = std::sqrt(lf.rss);
  out.model = ExtrapolationModel::inv_log;
  return out;
}

// Kolmogorov distance between a sample and a continuous cdf.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  if (xs.empty()) throw ParameterError("ks_statistic needs samples");
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size()), d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

enum class Check { logz_limit, xi_histogram, variational_coupling, ldp, distributional };

inline std::string check_name(Check c) {
  switch (c) {
    case Check::logz_limit: return "logZ_limit";
    case Check::xi_histogram: return "xi_histogram";
    case Check::variational_coupling: return "variational_coupling";
    case Check::ldp: return "ldp";
    case Check::distributional: return "distributional";
  }
  return "?";
}

inline Check check_from_name(const std::string& s) {
  for (auto c : {Check::logz_limit, Check::xi_histogram, Check::variational_coupling, Check::ldp, Check::distributional})
    if (check_name(c) == s) return c;
  throw ParameterError("unknown check '" + s + "'");
}

struct SweepConfig {
  double alpha = 2.0;
  double beta_hat = 1.0;
  double h_hat = 1.0;
  double gamma = pos_inf;
  double zeta = pos_inf;
  double p = 0.5;  // positive-tail weight of the disorder
  std::vector<long> n_list;
  std::vector<std::uint64_t> seeds;
  std::vector<Check> checks{Check::logz_limit};
  // R1: bound on |Z - 1|; deterministic limits: distance to the constant;
  // R2-R4: distance to the variational value. Relative unless `absolute`.
  double tolerance = 0.05;
  bool absolute = false;
  double pass_fraction = 1.0;             // of seeds
  double window_cap = 1024.0;             // adaptive variational windows
  double max_unconverged_fraction = 0.0;  // above this the sweep is a convergence failure
  ExtrapolationModel model = ExtrapolationModel::power_correction;
  std::optional<double> target;  // replaces the closed-form constant

  PolymerParams params(long n) const { return {alpha, beta_hat, h_hat, gamma, zeta, n}; }
  RegionLabel label() const {
    double s = h_hat > 0 ? 1.0 : (h_hat < 0 ? -1.0 : 0.0);
    return classify_region(alpha, gamma, zeta, s, beta_hat > 0.0);
  }
  bool wants(Check c) const { return std::find(checks.begin(), checks.end(), c) != checks.end(); }

  void validate() const {
    params(1).validate();
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0,1]");
    if (n_list.empty()) throw ParameterError("N_list is empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      if (n_list[i] < 1) throw ParameterError("N_list entries must be >= 1");
      if (i > 0 && n_list[i] <= n_list[i - 1]) throw ParameterError("N_list must be strictly increasing");
    }
    if (seeds.empty()) throw ParameterError("seed list is empty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
      throw ParameterError("seeds must be distinct");
    if (!(tolerance > 0.0)) throw ParameterError("tolerance must be > 0");
    if (!(pass_fraction >= 0.0 && pass_fraction <= 1.0)) throw ParameterError("pass_fraction must lie in [0,1]");
    if (!(window_cap >= 4.0)) throw ParameterError("window_cap must be >= 4");
    if (!(max_unconverged_fraction >= 0.0 && max_unconverged_fraction <= 1.0))
      throw ParameterError("max_unconverged_fraction must lie in [0,1]");
    if (target && !std::isfinite(*target)) throw ParameterError("target must be finite");
  }
};

struct SweepRow {
  long n = 0;
  std::uint64_t seed = 0;
  double log_z = 0.0;
  double normalized = 0.0;  // N^{-theta} log Z
  double target = 0.0;
  std::optional<double> variational;
  double window = 0.0;  // variational window A, 0 when unused
  bool unconverged = false;
  double neglected = 0.0;  // relative mass bound left out of log Z
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  double value = 0.0;  // compared quantity: Z, extrapolated limit or normalized log Z
  double target = 0.0;
  Extrapolation fit;
  bool pass = false;
};

struct ScalingReport {
  RegionLabel label;
  SweepConfig config;
  std::vector<SweepRow> rows;  // ordered by (N, seed)
  std::optional<ExponentFit> theta_fit;  // of |mean log Z| against N
  std::optional<Extrapolation> limit;    // of the seed-mean normalized value
  std::optional<ExponentFit> spread_fit;  // interquartile range of log Z across seeds
  std::optional<double> target;           // closed-form constant when there is one
  std::vector<SeedOutcome> outcomes;
  std::size_t passed = 0, required = 0, unconverged = 0;
  bool pass = false;
  bool convergence_failure = false;

  std::string verdict() const { return convergence_failure ? "unconverged" : (pass ? "pass" : "fail"); }
};

namespace detail {

inline bool random_limit(Region r) { return r == Region::R2 || r == Region::R3 || r == Region::R4; }

inline Variant variant_of(Region r) {
  if (r == Region::R2) return Variant::R2;
  if (r == Region::R3) return Variant::R3;
  return Variant::R4;
}

inline bool within(double value, double target, double tol, bool absolute) {
  double d = std::fabs(value - target);
  return absolute ? d <= tol : d <= tol * std::fabs(target);
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

inline RegionLabel sweep_label(const SweepConfig& c) {
  auto l = c.label();
  if (l.region == Region::OtherBoundary) throw ParameterError("parameters lie on a phase boundary; no limit to test");
  if (l.region == Region::R4 && c.alpha <= 1.0) throw ParameterError("R4 needs alpha > 1");
  return l;
}

}  // namespace detail

inline Environment sweep_environment(const SweepConfig& c, std::uint64_t seed) {
  return make_environment({c.alpha, c.p, seed});
}

// Same-environment discrete variational value at resolution N^xi.
inline VariationalResult coupled_variational(const Environment& env, const SweepConfig& c, const RegionLabel& l, long n) {
  double res = std::pow(static_cast<double>(n), l.xi);
  Functional f{detail::variant_of(l.region), c.beta_hat, c.h_hat};
  auto source = [&](double a) { return PathGrid::from_environment(env, res, a); };
  return solve_adaptive(source, f, 4.0, c.window_cap);
}

inline ScalingReport run_logz_sweep(const SweepConfig& c) {
  c.validate();
  ScalingReport rep;
  rep.config = c;
  rep.label = detail::sweep_label(c);
  const auto& l = rep.label;
  const bool coupled = detail::random_limit(l.region);
  if (!coupled && l.region != Region::R1)
    rep.target = c.target ? *c.target : closed_form_limit(l.region, c.beta_hat, c.h_hat).value;
  if (l.region == Region::R1) rep.target = 0.0;

  const std::size_t ns = c.n_list.size(), ss = c.seeds.size();
  std::vector<WalkKernel> kernels;
  for (long n : c.n_list) kernels.emplace_back(n);
  rep.rows = parallel_map<SweepRow>(ns * ss, [&](std::size_t i) {
    long n = c.n_list[i / ss];
    std::uint64_t seed = c.seeds[i % ss];
    auto env = sweep_environment(c, seed);
    auto pr = partition(env, c.params(n), kernels[i / ss]);
    SweepRow row;
    row.n = n;
    row.seed = seed;
    row.log_z = pr.log_z;
    row.neglected = pr.neglected_relative();
    row.normalized = pr.log_z * std::pow(static_cast<double>(n), -l.theta);
    if (coupled) {
      auto v = coupled_variational(env, c, l, n);
      row.variational = v.value;
      row.target = v.value;
      row.window = v.window;
      row.unconverged = v.unconverged;
    } else {
      row.target = *rep.target;
    }
    return row;
  });

  for (const auto& r : rep.rows) rep.unconverged += r.unconverged;
  rep.convergence_failure = static_cast<double>(rep.unconverged) >
                            c.max_unconverged_fraction * static_cast<double>(rep.rows.size());

  // seed-mean curves
  std::vector<Point> mean_logz, mean_norm;
  for (std::size_t j = 0; j < ns; ++j) {
    double sz = 0.0, sn = 0.0;
    std::vector<double> lz;
    for (std::size_t s = 0; s < ss; ++s) {
      const auto& r = rep.rows[j * ss + s];
      sz += r.log_z;
      sn += r.normalized;
      lz.push_back(r.log_z);
    }
    double n = static_cast<double>(c.n_list[j]);
    mean_logz.push_back({n, std::fabs(sz / static_cast<double>(ss))});
    mean_norm.push_back({n, sn / static_cast<double>(ss)});
  }
  if (ns >= 3) {
    try {
      rep.theta_fit = fit_exponent(mean_logz);
    } catch (const ParameterError&) {
    }
    if (ss >= 4) {
      std::vector<Point> iqr;
      for (std::size_t j = 0; j < ns; ++j) {
        std::vector<double> lz;
        for (std::size_t s = 0; s < ss; ++s) lz.push_back(rep.rows[j * ss + s].log_z);
        iqr.push_back({static_cast<double>(c.n_list[j]), detail::quantile(lz, 0.75) - detail::quantile(lz, 0.25)});
      }
      try {
        rep.spread_fit = fit_exponent(iqr);
      } catch (const ParameterError&) {
      }
    }
  }
  if (ns >= 4 && !coupled && l.region != Region::R1) rep.limit = extrapolate(mean_norm, c.model);

  for (std::size_t s = 0; s < ss; ++s) {
    SeedOutcome o;
    o.seed = c.seeds[s];
    const auto& last = rep.rows[(ns - 1) * ss + s];
    if (l.region == Region::R1) {
      o.value = std::exp(last.log_z);
      o.target = 1.0;
    } else if (coupled) {
      o.value = last.normalized;
      o.target = last.target;
    } else {
      o.target = *rep.target;
      o.value = last.normalized;
      if (ns >= 4) {
        std::vector<Point> pts;
        for (std::size_t j = 0; j < ns; ++j) pts.push_back({static_cast<double>(c.n_list[j]), rep.rows[j * ss + s].normalized});
        o.fit = extrapolate(pts, c.model);
        o.value = o.fit.limit;
      }
    }
    o.pass = detail::within(o.value, o.target, c.tolerance, c.absolute || l.region == Region::R1);
    rep.passed += o.pass;
    rep.outcomes.push_back(o);
  }
  rep.required = static_cast<std::size_t>(std::ceil(c.pass_fraction * static_cast<double>(ss) - 1e-9));
  rep.pass = !rep.convergence_failure && rep.passed >= rep.required;
  return rep;
}

// Concentration of the polymer at the largest N.
struct ConcentrationCheck {
  std::string name;
  std::uint64_t seed = 0;
  double value = 0.0;
  double threshold = 0.0;
  bool upper = false;  // value must be <= threshold instead of >=
  bool pass = false;
};

struct XiReport {
  RegionLabel label;
  long n = 0;
  double epsilon = 0.1;
  std::vector<ConcentrationCheck> checks;
  bool pass = false;
};

struct XiOptions {
  double epsilon = 0.1;
  std::vector<double> eta_ladder{0.5, 0.25, 0.1, 0.05, 0.02, 0.01};
  double width_band = 0.3;     // R5 range width around its limit, in units of N^{1/3}
  double velocity_band = 0.05;  // boundary endpoint |S_N|/N around tanh|h|
  double ks_limit = 0.02;       // R1 endpoint law against the free walk
};

inline XiReport run_xi_check(const SweepConfig& c, const XiOptions& o = {}) {
  c.validate();
  XiReport rep;
  rep.label = detail::sweep_label(c);
  rep.epsilon = o.epsilon;
  const auto& l = rep.label;
  long n = c.n_list.back();
  rep.n = n;
  WalkKernel k(n);
  double scale = std::pow(static_cast<double>(n), l.xi);
  auto per_seed = parallel_map<std::vector<ConcentrationCheck>>(c.seeds.size(), [&](std::size_t s) {
    std::vector<ConcentrationCheck> out;
    std::uint64_t seed = c.seeds[s];
    auto env = sweep_environment(c, seed);
    auto p = c.params(n);
    auto m = polymer_range_marginal(env, p, k);
    double best = 0.0;
    for (double eta : o.eta_ladder)
      best = std::max(best, m.mass([&](long a, long b) {
        double x = static_cast<double>(std::max(a, b));
        return x >= eta * scale && x <= scale / eta;
      }));
    out.push_back({"range_exponent", seed, best, 1.0 - o.epsilon, false, best >= 1.0 - o.epsilon});
    if (l.region == Region::R5) {
      double w = closed_form_limit(Region::R5, c.beta_hat, c.h_hat).width;
      double mass = m.mass([&](long a, long b) {
        return std::fabs(static_cast<double>(a + b) / scale - w) <= o.width_band;
      });
      out.push_back({"range_width", seed, mass, 1.0 - o.epsilon, false, mass >= 1.0 - o.epsilon});
    }
    if (l.region == Region::BoundaryR4tR5t || l.region == Region::R1) {
      auto e = polymer_endpoint_marginal(env, p, k);
      if (l.region == Region::R1) {
        double d = ks_distance(e, srw_endpoint_law(k));
        out.push_back({"endpoint_ks", seed, d, o.ks_limit, true, d <= o.ks_limit});
      } else {
        double v = closed_form_limit(l.region, c.beta_hat, c.h_hat).velocity, mass = 0.0;
        for (long x = -n; x <= n; ++x)
          if (std::fabs(std::fabs(static_cast<double>(x)) / static_cast<double>(n) - v) <= o.velocity_band) mass += e.at(x);
        out.push_back({"endpoint_velocity", seed, mass, 1.0 - o.epsilon, false, mass >= 1.0 - o.epsilon});
      }
    }
    return out;
  });
  rep.pass = true;
  for (auto& v : per_seed)
    for (auto& ch : v) {
      rep.pass = rep.pass && ch.pass;
      rep.checks.push_back(ch);
    }
  return rep;
}

// -log P of the walk event behind each rate function.
struct LdpRow {
  long n = 0;
  double neg_log_p = 0.0;
  double normalized = 0.0;
};

struct LdpReport {
  double xi = 0.0, u = 0.0, v = 0.0;
  std::string rate;  // "Ibar", "I" or "kappa"
  double target = 0.0;
  std::vector<LdpRow> rows;
  Extrapolation fit;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// log P(M- <= -a, M+ >= b) by inclusion-exclusion over alternating crossings:
// k alternations starting from one side cost the same as reaching level
// (side) + (k-1)(a+b) by reflection.
inline double log_visits_both(long n, long a, long b) {
  if (a == 0 && b == 0) return 0.0;
  if (a == 0 || b == 0) return max_tail(n, a + b).log_value;
  SignedLogSum s;
  for (long k = 2;; ++k) {
    long la = a + (k - 1) * (a + b), lb = b + (k - 1) * (a + b);
    if (la > n && lb > n) break;
    int sign = k % 2 == 0 ? 1 : -1;
    s.add_log(max_tail(n, la).log_value, sign);
    s.add_log(max_tail(n, lb).log_value, sign);
  }
  auto t = s.total();
  return t.sign > 0 ? t.log_abs : neg_inf;
}

inline LdpRow ldp_row(double xi, double u, double v, long n) {
  double s = std::pow(static_cast<double>(n), xi);
  LdpRow r;
  r.n = n;
  double lp;
  if (xi < 0.5) {
    auto a = static_cast<long>(std::floor(-u * s + 1e-9)), b = static_cast<long>(std::floor(v * s + 1e-9));
    lp = confined_survival(n, a, b).log_value;
  } else {
    auto a = static_cast<long>(std::ceil(-u * s - 1e-9)), b = static_cast<long>(std::ceil(v * s - 1e-9));
    lp = u == 0.0 ? max_tail(n, b).log_value : log_visits_both(n, a, b);
  }
  r.neg_log_p = -lp;
  r.normalized = r.neg_log_p / std::pow(static_cast<double>(n), xi == 1.0 ? 1.0 : std::fabs(2.0 * xi - 1.0));
  return r;
}

inline LdpReport run_ldp_validation(double xi, double u, double v, const std::vector<long>& n_list,
                                    double tolerance = 0.05) {
  if (!(u <= 0.0 && v >= 0.0)) throw ParameterError("need u <= 0 <= v");
  if (!(xi > 0.0 && xi <= 1.0) || xi == 0.5) throw ParameterError("xi must lie in (0,1] and differ from 1/2");
  if (xi < 0.5 && !(v - u > 0.0)) throw ParameterError("folding needs v - u > 0");
  if (xi >= 0.5 && !(std::max(-u, v) > 0.0)) throw ParameterError("stretching needs u < 0 or v > 0");
  if (xi == 1.0 && u != 0.0) throw ParameterError("the linear-scale check is one-sided (u = 0)");
  LdpReport rep;
  rep.xi = xi;
  rep.u = u;
  rep.v = v;
  rep.tolerance = tolerance;
  if (xi < 0.5) {
    rep.rate = "Ibar";
    rep.target = rate_Ibar(u, v);
  } else if (xi < 1.0) {
    rep.rate = "I";
    rep.target = rate_I(u, v);
  } else {
    rep.rate = "kappa";
    rep.target = kappa(v);
  }
  std::vector<Point> pts;
  for (long n : n_list) {
    rep.rows.push_back(ldp_row(xi, u, v, n));
    pts.push_back({static_cast<double>(n), rep.rows.back().normalized});
  }
  rep.fit = pts.size() >= 4 ? extrapolate(pts) : Extrapolation{pts.back().second};
  rep.rel_error = std::fabs(rep.fit.limit - rep.target) / std::fabs(rep.target);
  rep.pass = rep.rel_error <= tolerance;
  return rep;
}

// One-sided variational values on alpha = 2 coupled paths against their laws:
// W~R3 / beta_hat ~ |N(0,1)| and W~R4 ~ Exponential(2 h_hat / beta_hat^2).
struct DistributionReport {
  Variant variant = Variant::R3;
  std::size_t samples = 0, unconverged = 0;
  double ks = 0.0;
  double tolerance = 0.05;
  bool pass = false;
};

inline DistributionReport run_distributional(Variant variant, double beta_hat, double h_hat, std::size_t samples,
                                             std::uint64_t base_seed = 0, double resolution = 4096.0,
                                             double tolerance = 0.05) {
  if (variant == Variant::R2) throw ParameterError("the distributional identities cover R3 and R4");
  if (!(beta_hat > 0.0)) throw ParameterError("beta_hat must be > 0");
  if (variant == Variant::R4 && !(h_hat > 0.0)) throw ParameterError("R4 needs h_hat > 0");
  if (samples == 0) throw ParameterError("need at least one sample");
  Functional f{variant, beta_hat, h_hat, true};
  auto results = parallel_map<VariationalResult>(samples, [&](std::size_t i) {
    auto env = make_environment({2.0, 0.5, derive_seed(base_seed, i)});
    auto source = [&](double a) { return PathGrid::from_environment(env, resolution, a); };
    return solve_adaptive(source, f);
  });
  DistributionReport rep;
  rep.variant = variant;
  rep.samples = samples;
  rep.tolerance = tolerance;
  std::vector<double> xs;
  for (const auto& r : results) {
    rep.unconverged += r.unconverged;
    xs.push_back(r.value);
  }
  if (variant == Variant::R3)
    rep.ks = ks_statistic(xs, [&](double x) { return x <= 0.0 ? 0.0 : std::erf(x / beta_hat / std::sqrt(2.0)); });
  else
    rep.ks = ks_statistic(xs, [&](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-2.0 * h_hat / (beta_hat * beta_hat) * x); });
  rep.pass = rep.ks <= tolerance && rep.unconverged == 0;
  return rep;
}

}  // namespace polylab
