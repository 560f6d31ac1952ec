// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "env.hpp"
#include "errors.hpp"
#include "logmath.hpp"
#include "rates.hpp"

namespace polylab {

// Rescaled path on the lattice {k/n : |k| <= K}, K = floor(A n). The two branches
// are kept apart: plus[b] = X_{b/n} and minus[a] = X_{-a/n}. For environment paths
// minus[0] = 0 (the left sum is empty) while plus[0] = n^{-1/alpha} w_0, which makes
// beta_hat (plus[b] - minus[a]) exactly the normalized disorder over the range [-a, b].
struct PathGrid {
  double n = 1.0;
  double alpha = 2.0;
  double window = 0.0;
  long k_max = 0;
  std::vector<double> plus, minus;

  double u(long a) const { return -static_cast<double>(a) / n; }
  double v(long b) const { return static_cast<double>(b) / n; }
  double at(long k) const { return k >= 0 ? plus[static_cast<std::size_t>(k)] : minus[static_cast<std::size_t>(-k)]; }

  static long lattice_extent(double n, double window) {
    if (!(n > 0.0) || !(window > 0.0)) throw ParameterError("path grid needs n > 0 and window > 0");
    return static_cast<long>(std::floor(window * n + 1e-9));
  }

  static PathGrid from_environment(const Environment& env, double n, double window) {
    if (!(n >= 1.0)) throw ParameterError("coupled path needs n >= 1");
    PathGrid g;
    g.n = n;
    g.alpha = env.spec().alpha;
    g.window = window;
    g.k_max = lattice_extent(n, window);
    auto ps = env.partial_sums(static_cast<std::size_t>(g.k_max));
    g.plus.resize(static_cast<std::size_t>(g.k_max + 1));
    g.minus.resize(static_cast<std::size_t>(g.k_max + 1));
    for (long k = 0; k <= g.k_max; ++k) {
      g.plus[static_cast<std::size_t>(k)] = coupled_value(ps, g.alpha, n, k);
      g.minus[static_cast<std::size_t>(k)] = k == 0 ? 0.0 : coupled_value(ps, g.alpha, n, -k);
    }
    return g;
  }

  static PathGrid from_function(double n, double window, const std::function<double(double)>& x, double alpha = 2.0) {
    PathGrid g;
    g.n = n;
    g.alpha = alpha;
    g.window = window;
    g.k_max = lattice_extent(n, window);
    g.plus.resize(static_cast<std::size_t>(g.k_max + 1));
    g.minus.resize(static_cast<std::size_t>(g.k_max + 1));
    for (long k = 0; k <= g.k_max; ++k) {
      g.plus[static_cast<std::size_t>(k)] = x(static_cast<double>(k) / n);
      g.minus[static_cast<std::size_t>(k)] = x(-static_cast<double>(k) / n);
    }
    return g;
  }
};

enum class Variant { R2, R3, R4 };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::R2: return "R2";
    case Variant::R3: return "R3";
    case Variant::R4: return "R4";
  }
  return "?";
}

// Lattice pair (u, v) = (-a/n, b/n).
struct LatticePair {
  long a = 0, b = 0;
  bool operator==(const LatticePair&) const = default;
  auto operator<=>(const LatticePair& o) const { return std::pair{-a, b} <=> std::pair{-o.a, o.b}; }
};

struct VariationalResult {
  Variant variant = Variant::R2;
  double value = neg_inf;
  std::vector<LatticePair> maximizers;  // lexicographic in (u, v)
  double window = 0.0;
  double n = 1.0;
  bool one_sided = false;
  bool unconverged = false;  // a maximizer sits on the window edge

  std::vector<std::pair<double, double>> points() const {
    std::vector<std::pair<double, double>> out;
    for (auto p : maximizers) out.emplace_back(-static_cast<double>(p.a) / n, static_cast<double>(p.b) / n);
    return out;
  }
};

inline constexpr double tie_tolerance = 1e-9;

struct Functional {
  Variant variant = Variant::R2;
  double beta_hat = 1.0;
  double h_hat = 0.0;
  bool one_sided = false;

  // -inf when (a, b) is not admissible
  double operator()(const PathGrid& g, long a, long b) const {
    if (one_sided && a != 0) return neg_inf;
    double gain = beta_hat * (g.plus[static_cast<std::size_t>(b)] - g.minus[static_cast<std::size_t>(a)]);
    switch (variant) {
      case Variant::R2: return gain - rate_I(g.u(a), g.v(b));
      case Variant::R3: return r3_admissible(g.n, a, b) ? gain : neg_inf;
      case Variant::R4: return gain - h_hat * static_cast<double>(a + b) / g.n;
    }
    return neg_inf;
  }

  // |u| ^ v + v - u <= 1, read on the lattice as min(a,b) + a + b <= n
  static bool r3_admissible(double n, long a, long b) {
    return static_cast<double>(std::min(a, b) + a + b) <= n * (1.0 + 1e-12);
  }
};

namespace detail {

inline void check_r4(const PathGrid& g) {
  if (g.alpha <= 1.0) throw ParameterError("W_R4 is infinite for alpha <= 1");
}

// Exhaustive scan of the R2 functional over a in [a_lo, a_hi], b in [b_lo, b_hi],
// pruned with suffix maxima of the path and the monotonicity of I in |u| and v.
// Calls hit(a, b, value) for every pair with value >= threshold; the threshold is
// read live, so a hit may raise it.
template <class Hit>
void scan_r2(const PathGrid& g, double beta, long a_lo, long a_hi, long b_lo, long b_hi, const double& threshold, Hit&& hit,
             bool one_sided = false) {
  const long K = g.k_max;
  std::vector<double> suf_plus(static_cast<std::size_t>(K + 2), neg_inf), suf_neg_minus(static_cast<std::size_t>(K + 2), neg_inf);
  for (long k = K; k >= 0; --k) {
    suf_plus[static_cast<std::size_t>(k)] = std::max(suf_plus[static_cast<std::size_t>(k + 1)], g.plus[static_cast<std::size_t>(k)]);
    suf_neg_minus[static_cast<std::size_t>(k)] =
        std::max(suf_neg_minus[static_cast<std::size_t>(k + 1)], -g.minus[static_cast<std::size_t>(k)]);
  }
  if (one_sided) a_hi = std::min(a_hi, 0L);
  for (long a = a_lo; a <= a_hi; ++a) {
    double u = g.u(a);
    double outer = beta * (suf_plus[static_cast<std::size_t>(b_lo)] + suf_neg_minus[static_cast<std::size_t>(a)]) -
                   rate_I(u, g.v(b_lo));
    if (outer < threshold) break;
    double xa = g.minus[static_cast<std::size_t>(a)];
    for (long b = b_lo; b <= b_hi; ++b) {
      double ib = rate_I(u, g.v(b));
      if (beta * (suf_plus[static_cast<std::size_t>(b)] - xa) - ib < threshold) break;
      double val = beta * (g.plus[static_cast<std::size_t>(b)] - xa) - ib;
      if (val >= threshold) hit(a, b, val);
    }
  }
}

// Largest b with min(a,b) + a + b <= n, or -1.
inline long r3_b_limit(double n, long a) {
  double slack = n * (1.0 + 1e-12);
  if (static_cast<double>(a) > slack) return -1;
  if (3.0 * static_cast<double>(a) <= slack) return static_cast<long>(std::floor(slack - 2.0 * static_cast<double>(a)));
  return static_cast<long>(std::floor((slack - static_cast<double>(a)) / 2.0));
}

inline void finish(VariationalResult& r, const PathGrid& g) {
  std::sort(r.maximizers.begin(), r.maximizers.end());
  r.window = g.window;
  r.n = g.n;
  if (r.variant != Variant::R3)
    for (auto p : r.maximizers)
      if (p.a == g.k_max || p.b == g.k_max) r.unconverged = true;
}

}  // namespace detail

inline VariationalResult solve_R2(const PathGrid& g, double beta_hat, bool one_sided = false) {
  VariationalResult r;
  r.variant = Variant::R2;
  r.one_sided = one_sided;
  double best = neg_inf;
  detail::scan_r2(g, beta_hat, 0, g.k_max, 0, g.k_max, best, [&](long, long, double v) { best = std::max(best, v); },
                  one_sided);
  // second pass collects ties
  const double cut = best - tie_tolerance;
  detail::scan_r2(g, beta_hat, 0, g.k_max, 0, g.k_max, cut, [&](long a, long b, double) { r.maximizers.push_back({a, b}); },
                  one_sided);
  r.value = best;
  detail::finish(r, g);
  return r;
}

inline VariationalResult solve_R3(const PathGrid& g, double beta_hat, bool one_sided = false) {
  if (g.k_max < static_cast<long>(std::floor(g.n + 1e-9))) throw ParameterError("R3 needs a window of at least 1");
  VariationalResult r;
  r.variant = Variant::R3;
  r.one_sided = one_sided;
  std::vector<double> pre(g.plus.size());
  for (std::size_t k = 0; k < g.plus.size(); ++k) pre[k] = k == 0 ? g.plus[0] : std::max(pre[k - 1], g.plus[k]);
  const long a_top = one_sided ? 0 : g.k_max;
  std::vector<double> row(static_cast<std::size_t>(a_top + 1), neg_inf);
  double best = neg_inf;
  for (long a = 0; a <= a_top; ++a) {
    long bl = std::min(detail::r3_b_limit(g.n, a), g.k_max);
    if (bl < 0) break;
    row[static_cast<std::size_t>(a)] = beta_hat * (pre[static_cast<std::size_t>(bl)] - g.minus[static_cast<std::size_t>(a)]);
    best = std::max(best, row[static_cast<std::size_t>(a)]);
  }
  for (long a = 0; a <= a_top; ++a) {
    if (row[static_cast<std::size_t>(a)] < best - tie_tolerance) continue;
    long bl = std::min(detail::r3_b_limit(g.n, a), g.k_max);
    for (long b = 0; b <= bl; ++b)
      if (beta_hat * (g.plus[static_cast<std::size_t>(b)] - g.minus[static_cast<std::size_t>(a)]) >= best - tie_tolerance)
        r.maximizers.push_back({a, b});
  }
  r.value = best;
  detail::finish(r, g);
  return r;
}

inline VariationalResult solve_R4(const PathGrid& g, double beta_hat, double h_hat, bool one_sided = false) {
  detail::check_r4(g);
  if (!(h_hat > 0.0)) throw ParameterError("R4 needs h_hat > 0");
  VariationalResult r;
  r.variant = Variant::R4;
  r.one_sided = one_sided;
  // the functional splits into a right part in b and a left part in a
  auto right = [&](long b) { return beta_hat * g.plus[static_cast<std::size_t>(b)] - h_hat * g.v(b); };
  auto left = [&](long a) { return -beta_hat * g.minus[static_cast<std::size_t>(a)] + h_hat * g.u(a); };
  const long a_top = one_sided ? 0 : g.k_max;
  double br = neg_inf, bl = neg_inf;
  for (long b = 0; b <= g.k_max; ++b) br = std::max(br, right(b));
  for (long a = 0; a <= a_top; ++a) bl = std::max(bl, left(a));
  r.value = br + bl;
  std::vector<long> as, bs;
  for (long a = 0; a <= a_top; ++a)
    if (left(a) >= bl - tie_tolerance) as.push_back(a);
  for (long b = 0; b <= g.k_max; ++b)
    if (right(b) >= br - tie_tolerance) bs.push_back(b);
  for (long a : as)
    for (long b : bs)
      if (left(a) + right(b) >= r.value - tie_tolerance) r.maximizers.push_back({a, b});
  detail::finish(r, g);
  return r;
}

inline VariationalResult solve(const PathGrid& g, const Functional& f) {
  switch (f.variant) {
    case Variant::R2: return solve_R2(g, f.beta_hat, f.one_sided);
    case Variant::R3: return solve_R3(g, f.beta_hat, f.one_sided);
    case Variant::R4: return solve_R4(g, f.beta_hat, f.h_hat, f.one_sided);
  }
  throw ParameterError("unknown variant");
}

// Best functional value over pairs with max(a, b) > k_in.
inline double shell_best(const PathGrid& g, const Functional& f, long k_in) {
  if (f.variant == Variant::R4) {
    detail::check_r4(g);
    auto right = [&](long b) { return f.beta_hat * g.plus[static_cast<std::size_t>(b)] - f.h_hat * g.v(b); };
    auto left = [&](long a) { return -f.beta_hat * g.minus[static_cast<std::size_t>(a)] + f.h_hat * g.u(a); };
    const long a_top = f.one_sided ? 0 : g.k_max;
    double r_all = neg_inf, r_out = neg_inf, l_all = neg_inf, l_out = neg_inf;
    for (long b = 0; b <= g.k_max; ++b) {
      r_all = std::max(r_all, right(b));
      if (b > k_in) r_out = std::max(r_out, right(b));
    }
    for (long a = 0; a <= a_top; ++a) {
      l_all = std::max(l_all, left(a));
      if (a > k_in) l_out = std::max(l_out, left(a));
    }
    return std::max(r_out + l_all, r_all + l_out);
  }
  if (f.variant == Variant::R2) {
    double best = neg_inf;
    auto keep = [&](long, long, double v) { best = std::max(best, v); };
    if (k_in < g.k_max) {
      detail::scan_r2(g, f.beta_hat, k_in + 1, g.k_max, 0, g.k_max, best, keep, f.one_sided);
      detail::scan_r2(g, f.beta_hat, 0, std::min(k_in, g.k_max), k_in + 1, g.k_max, best, keep, f.one_sided);
    }
    return best;
  }
  throw ParameterError("adaptive windows apply to R2 and R4 only");
}

struct WindowChoice {
  double window = 0.0;
  bool unconverged = false;
};

// Doubles A from a_start until the best value on the shell (A/2, A] falls a full
// unit below the overall maximum; stops with a flag at the cap.
inline WindowChoice adaptive_window(const std::function<PathGrid(double)>& source, const Functional& f,
                                    double a_start = 4.0, double a_cap = 1024.0) {
  if (f.variant == Variant::R3) throw ParameterError("adaptive windows apply to R2 and R4 only");
  for (double a = a_start;; a *= 2.0) {
    PathGrid g = source(a);
    double top = solve(g, f).value;
    long k_in = PathGrid::lattice_extent(g.n, a / 2.0);
    if (shell_best(g, f, k_in) < top - 1.0) return {a, false};
    if (a * 2.0 > a_cap) return {a, true};
  }
}

// Solve on the adaptively chosen window; the unconverged flag is carried over.
inline VariationalResult solve_adaptive(const std::function<PathGrid(double)>& source, const Functional& f,
                                        double a_start = 4.0, double a_cap = 1024.0) {
  if (f.variant == Variant::R3) return solve(source(1.0), f);
  auto w = adaptive_window(source, f, a_start, a_cap);
  auto r = solve(source(w.window), f);
  r.unconverged = r.unconverged || w.unconverged;
  return r;
}

// Lattice pairs whose closed eps-box in (u, v) contains a maximizer.
inline std::vector<LatticePair> quasi_maximizers(const PathGrid& g, const Functional& f, double eps) {
  if (eps < 0.0) throw ParameterError("eps must be >= 0");
  auto res = solve(g, f);
  const long r = static_cast<long>(std::floor(eps * g.n + 1e-9));
  std::vector<LatticePair> out;
  for (auto m : res.maximizers)
    for (long a = std::max(0L, m.a - r); a <= std::min(g.k_max, m.a + r); ++a) {
      if (f.one_sided && a != 0) continue;
      for (long b = std::max(0L, m.b - r); b <= std::min(g.k_max, m.b + r); ++b) out.push_back({a, b});
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct ClosedFormLimit {
  double value = 0.0;
  double width = std::numeric_limits<double>::quiet_NaN();     // R5 optimal range width
  double velocity = std::numeric_limits<double>::quiet_NaN();  // R4~/R5~ boundary
  std::vector<std::pair<double, double>> maximizers;           // (u, v)
};

// Deterministic limits of N^-theta log Z.
inline ClosedFormLimit closed_form_limit(Region region, double beta_hat, double h_hat) {
  (void)beta_hat;
  const double pi = std::numbers::pi, h = std::fabs(h_hat);
  ClosedFormLimit c;
  switch (region) {
    case Region::R1: c.value = 0.0; break;
    case Region::R5:
      if (!(h_hat > 0)) throw ParameterError("R5 needs h_hat > 0");
      c.value = -1.5 * std::pow(h_hat * pi, 2.0 / 3.0);
      c.width = std::pow(pi, 2.0 / 3.0) * std::pow(h_hat, -1.0 / 3.0);
      break;
    case Region::R6: c.value = -2.0 * h_hat; break;
    case Region::R4t:
      c.value = 0.5 * h * h;
      c.maximizers = {{-h, 0.0}, {0.0, h}};
      break;
    case Region::R5t: c.value = h; break;
    case Region::BoundaryR4tR5t:
      // sup_t (|h| t - kappa(t)), attained at t = tanh|h|
      c.value = std::log(std::cosh(h));
      c.velocity = std::tanh(h);
      break;
    case Region::R2:
    case Region::R3:
    case Region::R4: throw ParameterError("region " + region_name(region) + " has a random limit; use solve_" + region_name(region));
    case Region::OtherBoundary: throw ParameterError("no limit is assigned on this boundary");
  }
  return c;
}

}  // namespace polylab
