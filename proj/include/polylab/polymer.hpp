// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <tuple>
#include <vector>

#include "env.hpp"
#include "errors.hpp"
#include "logmath.hpp"
#include "srw_exact.hpp"

namespace polylab {

// Couplings beta_N = beta_hat N^-gamma and h_N = h_hat N^-zeta. An infinite
// gamma or zeta switches the coupling off.
struct PolymerParams {
  double alpha = 2.0;
  double beta_hat = 0.0;
  double h_hat = 0.0;
  double gamma = pos_inf;
  double zeta = pos_inf;
  long n = 1;

  void validate() const {
    check_alpha(alpha);
    if (n < 1) throw ParameterError("N must be >= 1");
    if (!(beta_hat >= 0.0) || !std::isfinite(beta_hat)) throw ParameterError("beta_hat must be finite and >= 0");
    if (!std::isfinite(h_hat)) throw ParameterError("h_hat must be finite");
    if (std::isnan(gamma) || std::isnan(zeta) || gamma == neg_inf || zeta == neg_inf)
      throw ParameterError("gamma and zeta must be real or +inf");
  }
  double beta_n() const {
    if (gamma == pos_inf || beta_hat == 0.0) return 0.0;
    return beta_hat * std::pow(static_cast<double>(n), -gamma);
  }
  double h_n() const {
    if (zeta == pos_inf || h_hat == 0.0) return 0.0;
    return h_hat * std::pow(static_cast<double>(n), -zeta);
  }
};

struct Window {
  long a_max = 0, b_max = 0;
};

// Outcome of a cell sum. log_neglected bounds the mass that was not visited.
struct PartitionResult {
  double log_z = neg_inf;
  double log_neglected = neg_inf;
  long a_extent = 0, b_extent = 0;  // largest a and b visited
  std::size_t cells = 0;

  double neglected_relative() const { return std::exp(log_neglected - log_z); }
};

namespace detail {

// Max-shifted running sum of exp(l). Order of additions is the caller's.
class LogAccumulator {
 public:
  void add(double l) {
    if (l == neg_inf) return;
    if (l > scale_) {
      sum_ = sum_ * std::exp(scale_ - l) + 1.0;
      scale_ = l;
    } else {
      sum_ += std::exp(l - scale_);
    }
  }
  double value() const { return scale_ == neg_inf ? neg_inf : scale_ + std::log(sum_); }

 private:
  double scale_ = neg_inf, sum_ = 0.0;
};

// Sparse table for range maxima.
class MaxTable {
 public:
  explicit MaxTable(const std::vector<double>& v) {
    levels_.push_back(v);
    for (std::size_t k = 1; (std::size_t{1} << k) <= v.size(); ++k) {
      const auto& prev = levels_.back();
      std::size_t half = std::size_t{1} << (k - 1), len = v.size() - (std::size_t{1} << k) + 1;
      std::vector<double> cur(len);
      for (std::size_t i = 0; i < len; ++i) cur[i] = std::max(prev[i], prev[i + half]);
      levels_.push_back(std::move(cur));
    }
  }
  // max over [lo, hi]
  double max(long lo, long hi) const {
    auto len = static_cast<std::size_t>(hi - lo + 1);
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= len) ++k;
    return std::max(levels_[k][static_cast<std::size_t>(lo)], levels_[k][static_cast<std::size_t>(hi) + 1 - (std::size_t{1} << k)]);
  }

 private:
  std::vector<std::vector<double>> levels_;
};

// Log weights split as f(a) + g(b), where |R| = a + b + 1.
struct SplitWeights {
  std::vector<double> f, g;
};

inline SplitWeights split_weights(const Environment& env, const PolymerParams& p) {
  p.validate();
  const double beta = p.beta_n(), h = p.h_n();
  auto ps = env.partial_sums(static_cast<std::size_t>(p.n));
  SplitWeights w;
  w.f.resize(static_cast<std::size_t>(p.n + 1));
  w.g.resize(static_cast<std::size_t>(p.n + 1));
  for (long j = 0; j <= p.n; ++j) {
    auto i = static_cast<std::size_t>(j);
    w.f[i] = (beta == 0.0 ? 0.0 : beta * ps.minus[i]) - h * static_cast<double>(j);
    w.g[i] = (beta == 0.0 ? 0.0 : beta * ps.plus[i]) - h * static_cast<double>(j + 1);
  }
  return w;
}

[[noreturn]] inline void weight_overflow(long a, long b) {
  std::ostringstream os;
  os << "non-finite Gibbs weight at cell (a=" << a << ", b=" << b << "); reduce N or the couplings";
  throw ConvergenceError(os.str());
}

// Upper bound (log) on P(M- <= -s, M+ >= t).
inline double log_cover_bound(const WalkKernel& k, long s, long t) {
  double c = std::min(k.log_max_tail(s), k.log_max_tail(t));
  if (s > 0 && t > 0) c = std::min(c, log_add(k.log_max_tail(2 * s + t), k.log_max_tail(s + 2 * t)));
  return c;
}

// Visits cells (a, b) in lexicographic order and stops a row, or the whole scan,
// once the remaining mass is provably below tol times the running total. The
// visitor receives log(weight * probability).
class CellScan {
 public:
  CellScan(const WalkKernel& k, const SplitWeights& w) : k_(k), w_(w), n_(k.steps()), fmax_(w.f), gmax_(w.g) {}

  template <class Visit>
  PartitionResult run(double tol, std::optional<Window> window, const std::function<bool(long, long)>& keep,
                      Visit&& visit) const {
    const double ltol = std::log(tol);
    LogAccumulator total, kept, dropped;
    // a restricted sum is only certified relative to itself
    const LogAccumulator& ref = keep ? kept : total;
    PartitionResult r;
    const long amax = window ? std::min(window->a_max, n_) : n_;
    for (long a = 0; a <= amax; ++a) {
      if (!window && a > 0 && (a & 7) == 0) {
        double rest = rows_bound(a);
        if (rest < ref.value() + ltol) {
          dropped.add(rest);
          break;
        }
      }
      const double fa = w_.f[static_cast<std::size_t>(a)];
      const long bmax = window ? std::min(window->b_max, n_ - a) : n_ - a;
      for (long b = 0; b <= bmax; ++b) {
        if (!window && b > 0 && ((b & 15) == 0 || (b & (b - 1)) == 0)) {
          double rest = row_bound(a, b, bmax);
          if (rest < ref.value() + ltol) {
            dropped.add(rest);
            break;
          }
        }
        double lp = k_.log_cell(a, b);
        if (lp == neg_inf) continue;
        double lw = fa + w_.g[static_cast<std::size_t>(b)];
        if (!std::isfinite(lw)) weight_overflow(a, b);
        double l = lw + lp;
        total.add(l);
        if (keep && !keep(a, b)) continue;
        kept.add(l);
        visit(a, b, l);
        ++r.cells;
        r.a_extent = std::max(r.a_extent, a);
        r.b_extent = std::max(r.b_extent, b);
      }
    }
    if (window) dropped.add(outside_bound(amax, std::min(window->b_max, n_)));
    r.log_z = kept.value();
    r.log_neglected = dropped.value();
    return r;
  }

 private:
  // bound on sum over b' in [b, bmax] for row a
  double row_bound(long a, long b, long bmax) const {
    LogAccumulator acc;
    double ma = k_.log_max_pmf(a);
    for (long t = b, len = 1; t <= bmax; t += len, len *= 2) {
      long u = std::min(bmax, t + len - 1);
      double c = std::min(ma, log_cover_bound(k_, a, t));
      acc.add(gmax_.max(t, u) + c);
    }
    return w_.f[static_cast<std::size_t>(a)] + acc.value();
  }

  // bound on all cells with a' >= a
  double rows_bound(long a) const {
    LogAccumulator acc;
    for (long s = a, la = 1; s <= n_; s += la, la *= 2) {
      long e = std::min(n_, s + la - 1);
      double fm = fmax_.max(s, e);
      for (long t = 0, lb = 1; t <= n_ - s; t += lb, lb *= 2) {
        long u = std::min(n_ - s, t + lb - 1);
        acc.add(fm + gmax_.max(t, u) + log_cover_bound(k_, s, t));
      }
    }
    return acc.value();
  }

  // bound on cells outside [0, amax] x [0, bmax]
  double outside_bound(long amax, long bmax) const {
    LogAccumulator acc;
    if (amax < n_) acc.add(rows_bound(amax + 1));
    if (bmax < n_)
      for (long s = 0, la = 1; s <= std::min(amax, n_ - bmax - 1); s += la, la *= 2) {
        long e = std::min({amax, n_ - bmax - 1, s + la - 1});
        double fm = fmax_.max(s, e);
        for (long t = bmax + 1, lb = 1; t <= n_ - s; t += lb, lb *= 2) {
          long u = std::min(n_ - s, t + lb - 1);
          acc.add(fm + gmax_.max(t, u) + log_cover_bound(k_, s, t));
        }
      }
    return acc.value();
  }

  const WalkKernel& k_;
  const SplitWeights& w_;
  long n_;
  MaxTable fmax_, gmax_;
};

inline constexpr double scan_tolerance = 1e-17;

}  // namespace detail

// Full result of the cell sum; `window` restricts to [0,a_max] x [0,b_max].
inline PartitionResult partition(const Environment& env, const PolymerParams& p, const WalkKernel& k,
                                 std::optional<Window> window = std::nullopt,
                                 const std::function<bool(long, long)>& keep = {}) {
  if (k.steps() != p.n) throw ParameterError("walk kernel length differs from N");
  auto w = detail::split_weights(env, p);
  detail::CellScan scan(k, w);
  return scan.run(detail::scan_tolerance, window, keep, [](long, long, double) {});
}

inline double log_partition(const Environment& env, const PolymerParams& p, std::optional<Window> window = std::nullopt) {
  WalkKernel k(p.n);
  return partition(env, p, k, window).log_z;
}

inline double log_partition(const Environment& env, const PolymerParams& p, const WalkKernel& k,
                            std::optional<Window> window = std::nullopt) {
  return partition(env, p, k, window).log_z;
}

// Sum over cells accepted by `keep`; -inf when none contributes.
inline double log_partition_restricted(const Environment& env, const PolymerParams& p,
                                       const std::function<bool(long, long)>& keep) {
  WalkKernel k(p.n);
  return partition(env, p, k, std::nullopt, keep).log_z;
}

inline double log_partition_restricted(const Environment& env, const PolymerParams& p, const WalkKernel& k,
                                       const std::function<bool(long, long)>& keep) {
  return partition(env, p, k, std::nullopt, keep).log_z;
}

struct PolymerCell {
  long a = 0, b = 0;
  double log_prob = neg_inf;  // under the polymer measure
};

struct PolymerRangeMarginal {
  double log_z = neg_inf;
  double log_neglected = neg_inf;
  std::vector<PolymerCell> cells;  // visited cells, lexicographic in (a, b)

  double log_at(long a, long b) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), std::pair{a, b},
                               [](const PolymerCell& c, const std::pair<long, long>& k) { return std::pair{c.a, c.b} < k; });
    return it != cells.end() && it->a == a && it->b == b ? it->log_prob : neg_inf;
  }
  // polymer mass of the cells accepted by pred
  double mass(const std::function<bool(long, long)>& pred) const {
    double s = 0.0;
    for (const auto& c : cells)
      if (pred(c.a, c.b)) s += std::exp(c.log_prob);
    return s;
  }
};

inline PolymerRangeMarginal polymer_range_marginal(const Environment& env, const PolymerParams& p, const WalkKernel& k) {
  if (k.steps() != p.n) throw ParameterError("walk kernel length differs from N");
  auto w = detail::split_weights(env, p);
  detail::CellScan scan(k, w);
  PolymerRangeMarginal m;
  auto r = scan.run(detail::scan_tolerance, std::nullopt, {},
                    [&](long a, long b, double l) { m.cells.push_back({a, b, l}); });
  for (auto& c : m.cells) c.log_prob -= r.log_z;
  m.log_z = r.log_z;
  m.log_neglected = r.log_neglected;
  return m;
}

inline PolymerRangeMarginal polymer_range_marginal(const Environment& env, const PolymerParams& p) {
  return polymer_range_marginal(env, p, WalkKernel(p.n));
}

// P(S_N = x) for x = -N..N under the polymer measure.
struct EndpointLaw {
  long n = 0;
  std::vector<double> pmf;  // index x + n
  double skipped = 0.0;     // polymer mass of cells left out

  double at(long x) const { return x < -n || x > n ? 0.0 : pmf[static_cast<std::size_t>(x + n)]; }
  double cdf(long x) const {
    double s = 0.0;
    for (long y = -n; y <= std::min(x, n); ++y) s += at(y);
    return s;
  }
};

enum class EndpointMethod { automatic, per_cell, box };

inline double ks_distance(const EndpointLaw& p, const EndpointLaw& q) {
  long n = std::max(p.n, q.n);
  double fp = 0.0, fq = 0.0, d = 0.0;
  for (long x = -n; x <= n; ++x) {
    fp += p.at(x);
    fq += q.at(x);
    d = std::max(d, std::fabs(fp - fq));
  }
  return d;
}

inline EndpointLaw srw_endpoint_law(const WalkKernel& k) {
  EndpointLaw e;
  e.n = k.steps();
  e.pmf.resize(static_cast<std::size_t>(2 * e.n + 1));
  for (long x = -e.n; x <= e.n; ++x) e.pmf[static_cast<std::size_t>(x + e.n)] = std::exp(k.log_pmf(x));
  return e;
}

namespace detail {

inline constexpr double endpoint_cell_cutoff = -41.4;  // log 1e-18

// Exact, cell by cell in log space; cells below the cutoff are skipped and counted.
inline EndpointLaw endpoint_per_cell(const PolymerRangeMarginal& m, const WalkKernel& k,
                                     double log_cutoff = endpoint_cell_cutoff) {
  const long n = k.steps();
  std::vector<LogAccumulator> acc(static_cast<std::size_t>(2 * n + 1));
  double skipped = 0.0;
  for (const auto& c : m.cells) {
    if (c.log_prob < log_cutoff) {
      skipped += std::exp(c.log_prob);
      continue;
    }
    double lc = k.log_cell(c.a, c.b);
    for (long x = -c.a; x <= c.b; ++x) {
      double l = k.log_cell_endpoint(c.a, c.b, x);
      if (l != neg_inf) acc[static_cast<std::size_t>(x + n)].add(c.log_prob - lc + l);
    }
  }
  EndpointLaw e;
  e.n = n;
  e.pmf.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) e.pmf[i] = std::exp(acc[i].value());
  e.skipped = skipped;
  return e;
}

// Summation by parts over the rectangle [0,A] x [0,B]: with separable weights the
// polymer endpoint law is sum F(a) G(b) U(a,b,x), U being the confined endpoint law,
// evaluated from the image series in linear space. Only sound when the weights
// relative to Z stay moderate; `amplification` reports sum |F||G| / Z.
inline EndpointLaw endpoint_box(const SplitWeights& w, double log_z, long amax, long bmax, const WalkKernel& k,
                                double* amplification) {
  const long n = k.steps();
  std::vector<double> p(static_cast<std::size_t>(2 * n + 1));
  for (long y = -n; y <= n; ++y) p[static_cast<std::size_t>(y + n)] = std::exp(k.log_pmf(y));
  // beyond L the walk pmf is below 1e-25 of its peak
  long L = n;
  while (L > 0 && p[static_cast<std::size_t>(L + n)] < 1e-25 * p[static_cast<std::size_t>(n + (n & 1))]) --L;
  auto pm = [&](long y) { return y < -L || y > L ? 0.0 : p[static_cast<std::size_t>(y + n)]; };
  auto diffs = [&](const std::vector<double>& lw, long top, double shift) {
    std::vector<double> d(static_cast<std::size_t>(top + 1));
    for (long i = 0; i <= top; ++i) {
      double here = std::exp(lw[static_cast<std::size_t>(i)] - shift);
      d[static_cast<std::size_t>(i)] = i < top ? here - std::exp(lw[static_cast<std::size_t>(i + 1)] - shift) : here;
    }
    return d;
  };
  double half = 0.5 * log_z;
  auto fa = diffs(w.f, amax, half), gb = diffs(w.g, bmax, half);
  double amp = 0.0;
  std::vector<double> out(static_cast<std::size_t>(2 * n + 1), 0.0);
  for (long a = 0; a <= amax; ++a)
    for (long b = 0; b <= bmax; ++b) {
      double c = fa[static_cast<std::size_t>(a)] * gb[static_cast<std::size_t>(b)];
      if (c == 0.0) continue;
      amp += std::fabs(c);
      const long period = 2 * (a + b + 2);
      for (long x = std::max(-a, -L); x <= std::min(b, L); ++x) {
        if ((x + n) & 1) continue;
        double u = 0.0;
        long r = 2 * b + 2 - x;
        for (long s = x - ((x + L) / period) * period; s <= L; s += period) u += pm(s);
        for (long s = r - ((r + L) / period) * period; s <= L; s += period) u -= pm(s);
        out[static_cast<std::size_t>(x + n)] += c * u;
      }
    }
  if (amplification) *amplification = amp;
  EndpointLaw e;
  e.n = n;
  e.pmf = std::move(out);
  return e;
}

}  // namespace detail

inline EndpointLaw polymer_endpoint_marginal(const Environment& env, const PolymerParams& p, const WalkKernel& k,
                                             EndpointMethod method = EndpointMethod::automatic) {
  auto m = polymer_range_marginal(env, p, k);
  const bool automatic = method == EndpointMethod::automatic;
  if (automatic) {
    double work = 0.0;
    for (const auto& c : m.cells)
      if (c.log_prob >= detail::endpoint_cell_cutoff) work += static_cast<double>(c.a + c.b + 1);
    method = work < 2e7 ? EndpointMethod::per_cell : EndpointMethod::box;
  }
  if (method == EndpointMethod::per_cell) return detail::endpoint_per_cell(m, k);
  long amax = 0, bmax = 0;
  for (const auto& c : m.cells) {
    amax = std::max(amax, c.a);
    bmax = std::max(bmax, c.b);
  }
  double amp = 0.0;
  auto e = detail::endpoint_box(detail::split_weights(env, p), m.log_z, amax, bmax, k, &amp);
  if (!(amp <= 1e4)) {
    if (automatic) return detail::endpoint_per_cell(m, k);
    throw ConvergenceError("box endpoint decomposition is ill conditioned here; use the per-cell method");
  }
  return e;
}

inline EndpointLaw polymer_endpoint_marginal(const Environment& env, const PolymerParams& p,
                                             EndpointMethod method = EndpointMethod::automatic) {
  return polymer_endpoint_marginal(env, p, WalkKernel(p.n), method);
}

// Direct sum over all 2^N paths; sites of the range are summed one by one.
inline double oracle_log_partition(const Environment& env, const PolymerParams& p) {
  p.validate();
  if (p.n > 20) throw ParameterError("oracle_log_partition is limited to N <= 20");
  const double beta = p.beta_n(), h = p.h_n();
  const int n = static_cast<int>(p.n);
  std::vector<double> site(static_cast<std::size_t>(2 * n + 1));
  for (int x = -n; x <= n; ++x) site[static_cast<std::size_t>(x + n)] = env.omega(x);
  std::vector<double> terms;
  terms.reserve(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int x = 0, lo = 0, hi = 0;
    for (int i = 0; i < n; ++i) {
      x += (mask >> i & 1) ? 1 : -1;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    double e = 0.0;
    for (int y = lo; y <= hi; ++y) e += beta * site[static_cast<std::size_t>(y + n)] - h;
    terms.push_back(e);
  }
  return log_sum_exp(terms) - n * std::numbers::ln2;
}

// Polymer law of (a, b, S_N) over all 2^N paths, keyed by (a, b, x).
inline std::map<std::tuple<long, long, long>, double> oracle_cell_law(const Environment& env, const PolymerParams& p) {
  p.validate();
  if (p.n > 20) throw ParameterError("oracle_cell_law is limited to N <= 20");
  const double beta = p.beta_n(), h = p.h_n();
  const int n = static_cast<int>(p.n);
  std::map<std::tuple<long, long, long>, std::vector<double>> logs;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int x = 0, lo = 0, hi = 0;
    for (int i = 0; i < n; ++i) {
      x += (mask >> i & 1) ? 1 : -1;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    double e = 0.0;
    for (int y = lo; y <= hi; ++y) e += beta * env.omega(y) - h;
    logs[{-lo, hi, x}].push_back(e);
  }
  std::map<std::tuple<long, long, long>, double> out;
  std::vector<double> all;
  for (auto& [k, v] : logs) all.push_back(out[k] = log_sum_exp(v));
  double lz = log_sum_exp(all);
  for (auto& [k, v] : out) v = std::exp(v - lz);
  return out;
}

}  // namespace polylab
