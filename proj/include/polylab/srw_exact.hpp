// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "logmath.hpp"

namespace polylab {

enum class SurvivalMethod { dp, spectral, automatic };

// N*w above this uses the spectral form.
inline constexpr long spectral_crossover = 1L << 20;

inline long double log_binomial_pmf(long n, long y) {
  if (y < 0) y = -y;
  if (y > n || ((n + y) & 1)) return -std::numeric_limits<long double>::infinity();
  long k = (n + y) / 2;
  return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
         std::lgamma(static_cast<long double>(n - k) + 1) - n * std::numbers::ln2_v<long double>;
}

// log P(stay in {0..w} for n steps | start s) for every s = 0..w, by vector iteration.
inline std::vector<double> confined_survival_dp_all(long n, long w) {
  std::vector<double> out(static_cast<std::size_t>(w + 1), 0.0);
  if (n == 0) return out;
  if (w == 0) {
    std::fill(out.begin(), out.end(), neg_inf);
    return out;
  }
  // site i lives at index i+1, with absorbing zeros at both ends
  std::vector<double> f(static_cast<std::size_t>(w + 3), 1.0), g(f.size(), 0.0);
  f.front() = f.back() = 0.0;
  double scale = 0.0;
  for (long k = 0; k < n; ++k) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      g[i] = 0.5 * (f[i - 1] + f[i + 1]);
      m = std::max(m, g[i]);
    }
    if (m < 1e-150) {
      for (std::size_t i = 1; i + 1 < f.size(); ++i) g[i] /= m;
      scale += std::log(m);
    }
    std::swap(f, g);
  }
  for (long s = 0; s <= w; ++s) out[static_cast<std::size_t>(s)] = std::log(f[static_cast<std::size_t>(s + 1)]) + scale;
  return out;
}

// sin(k*pi/m) with exact reduction of the integer argument.
inline double sin_pi_ratio(long k, long m) {
  long r = k % (2 * m);
  if (r < 0) r += 2 * m;
  if (r == 0 || r == m) return 0.0;
  int sign = 1;
  if (r > m) {
    r -= m;
    sign = -1;
  }
  if (2 * r > m) r = m - r;
  return sign * std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(m));
}

inline double cos_pi_ratio(long k, long m) { return sin_pi_ratio(2 * k + m, 2 * m); }

// Same quantity from the sine eigenbasis of the path graph on w+1 sites:
// q(s) = sum_{j odd} (2/M) sin(j pi (s+1)/M) cot(j pi/(2M)) cos^n(j pi/M), M = w+2.
inline std::vector<double> confined_survival_spectral_all(long n, long w) {
  std::vector<double> out(static_cast<std::size_t>(w + 1), 0.0);
  if (n == 0) return out;
  if (w == 0) {
    std::fill(out.begin(), out.end(), neg_inf);
    return out;
  }
  const long m = w + 2;
  struct Mode {
    long j;
    double lw;
    int sign;
  };
  std::vector<Mode> modes;
  double lead = neg_inf;
  for (long j = 1; j < m; j += 2) {
    double c = cos_pi_ratio(j, m);
    if (c == 0.0) continue;
    double cot = 1.0 / std::tan(std::numbers::pi * static_cast<double>(j) / (2.0 * static_cast<double>(m)));
    double lw = std::log(2.0 / static_cast<double>(m)) + std::log(cot) + static_cast<double>(n) * std::log(std::fabs(c));
    int sg = (c < 0 && (n & 1)) ? -1 : 1;
    modes.push_back({j, lw, sg});
    lead = std::max(lead, lw);
  }
  for (long s = 0; s <= w; ++s) {
    SignedLogSum acc;
    for (const auto& md : modes) {
      if (md.lw < lead - 80.0) continue;
      double sn = sin_pi_ratio(md.j * (s + 1), m);
      if (sn == 0.0) continue;
      acc.add_log(md.lw + std::log(std::fabs(sn)), sn > 0 ? md.sign : -md.sign);
    }
    SignedLog t = acc.total();
    out[static_cast<std::size_t>(s)] = t.sign > 0 ? std::min(t.log_abs, 0.0) : neg_inf;
  }
  return out;
}

inline std::vector<double> confined_survival_all(long n, long w, SurvivalMethod method = SurvivalMethod::automatic) {
  if (method == SurvivalMethod::automatic)
    method = n * (w + 1) > spectral_crossover ? SurvivalMethod::spectral : SurvivalMethod::dp;
  return method == SurvivalMethod::dp ? confined_survival_dp_all(n, w) : confined_survival_spectral_all(n, w);
}

inline LogProb confined_survival_dp(long n, long a, long b) {
  if (a < 0 || b < 0) throw ParameterError("confined_survival needs a, b >= 0");
  return {confined_survival_dp_all(n, a + b)[static_cast<std::size_t>(a)]};
}

// Single start, O(w) work.
inline LogProb confined_survival_spectral(long n, long a, long b) {
  if (a < 0 || b < 0) throw ParameterError("confined_survival needs a, b >= 0");
  if (n == 0) return {0.0};
  if (a + b == 0) return {neg_inf};
  const long m = a + b + 2;
  std::vector<std::pair<double, int>> terms;
  double lead = neg_inf;
  for (long j = 1; j < m; j += 2) {
    double c = cos_pi_ratio(j, m);
    double sn = sin_pi_ratio(j * (a + 1), m);
    if (c == 0.0 || sn == 0.0) continue;
    double cot = 1.0 / std::tan(std::numbers::pi * static_cast<double>(j) / (2.0 * static_cast<double>(m)));
    double lw = std::log(2.0 / static_cast<double>(m)) + std::log(cot) + std::log(std::fabs(sn)) +
                static_cast<double>(n) * std::log(std::fabs(c));
    int sg = ((c < 0 && (n & 1)) ? -1 : 1) * (sn > 0 ? 1 : -1);
    terms.emplace_back(lw, sg);
    lead = std::max(lead, lw);
  }
  SignedLogSum acc;
  for (auto [lw, sg] : terms)
    if (lw >= lead - 80.0) acc.add_log(lw, sg);
  SignedLog t = acc.total();
  return {t.sign > 0 ? std::min(t.log_abs, 0.0) : neg_inf};
}

inline LogProb confined_survival(long n, long a, long b, SurvivalMethod method = SurvivalMethod::automatic) {
  if (method == SurvivalMethod::automatic)
    method = n * (a + b + 1) > spectral_crossover ? SurvivalMethod::spectral : SurvivalMethod::dp;
  return method == SurvivalMethod::dp ? confined_survival_dp(n, a, b) : confined_survival_spectral(n, a, b);
}

// log P(M+_n >= m) = log(P(S_n >= m) + P(S_n > m)). Needs no tables, so n may be huge.
inline LogProb max_tail(long n, long m) {
  if (m <= 0) return {0.0};
  if (m > n) return {neg_inf};
  // P(S >= m) + P(S >= m+1) = 2 P(S >= m+1) + P(S = m)
  long y = m + 1;
  if ((n + y) & 1) ++y;
  long double acc_log = -std::numeric_limits<long double>::infinity();
  if (y <= n) {
    long double lp = log_binomial_pmf(n, y);
    long double first = lp, sum = 1.0L;  // relative to first term
    long double rel = 0.0L;
    for (long z = y; z + 2 <= n; z += 2) {
      rel += std::log1p(-static_cast<long double>(2 * z + 2) / static_cast<long double>(n + z + 2));
      long double t = std::exp(rel);
      sum += t;
      if (t < 1e-22L * sum) break;
    }
    acc_log = first + std::log(2.0L * sum);
  }
  long double lm = log_binomial_pmf(n, m);
  if (std::isfinite(static_cast<double>(lm))) {
    if (std::isfinite(static_cast<double>(acc_log))) {
      long double hi = std::max(acc_log, lm), lo = std::min(acc_log, lm);
      acc_log = hi + std::log1p(std::exp(lo - hi));
    } else {
      acc_log = lm;
    }
  }
  return {std::min(0.0, static_cast<double>(acc_log))};
}

struct RangeLaw {
  long n = 0, a_max = 0, b_max = 0;
  std::vector<double> log_cells;  // index a*(b_max+1)+b
  double log_overflow = neg_inf;  // mass with a > a_max or b > b_max

  double log_at(long a, long b) const {
    if (a < 0 || b < 0 || a > a_max || b > b_max) return neg_inf;
    return log_cells[static_cast<std::size_t>(a * (b_max + 1) + b)];
  }
  double total_mass() const {
    double s = std::exp(log_overflow);
    for (double l : log_cells) s += std::exp(l);
    return s;
  }
};

// Range law with the endpoint resolved; cell (a,b) carries x = -a..b.
struct RangeEndpointLaw {
  long n = 0, a_max = 0, b_max = 0;
  std::vector<std::size_t> offset;  // start of cell (a,b) in log_values
  std::vector<double> log_values;
  double log_overflow = neg_inf;

  double log_at(long a, long b, long x) const {
    if (a < 0 || b < 0 || a > a_max || b > b_max || x < -a || x > b) return neg_inf;
    return log_values[offset[static_cast<std::size_t>(a * (b_max + 1) + b)] + static_cast<std::size_t>(x + a)];
  }
};

// Tables for one walk length: log pmf of S_n, law of M+ and its tail, plus cached
// confined survivals by width. Cell probabilities come from inclusion-exclusion on
// survivals for narrow cells and from the reflection series for wide ones.
class WalkKernel {
 public:
  explicit WalkKernel(long n) : n_(n), cache_(std::make_shared<WidthCache>()) {
    if (n < 0) throw ParameterError("walk length must be >= 0");
    const long double ninf = -std::numeric_limits<long double>::infinity();
    lp_.assign(static_cast<std::size_t>(n + 3), ninf);
    long y0 = n & 1;
    long double cur = log_binomial_pmf(n, y0);
    for (long y = y0; y <= n; y += 2) {
      lp_[static_cast<std::size_t>(y)] = cur;
      cur += std::log1p(-static_cast<long double>(2 * y + 2) / static_cast<long double>(n + y + 2));
    }
    lt_.assign(static_cast<std::size_t>(n + 2), neg_inf);
    long double acc = ninf;
    for (long z = n; z >= 0; --z) {
      long double mz = lm(z);
      if (mz != ninf) {
        long double hi = std::max(acc, mz), lo = std::min(acc, mz);
        acc = lo == ninf ? hi : hi + std::log1p(std::exp(lo - hi));
      }
      lt_[static_cast<std::size_t>(z)] = static_cast<double>(acc);
    }
    lt_[0] = 0.0;
  }

  long steps() const { return n_; }

  double log_pmf(long y) const {
    y = std::labs(y);
    return y > n_ ? neg_inf : static_cast<double>(lp_[static_cast<std::size_t>(y)]);
  }
  // log P(M+ = z)
  double log_max_pmf(long z) const { return z < 0 ? neg_inf : static_cast<double>(lm(z)); }
  // log P(M+ >= z)
  double log_max_tail(long z) const {
    if (z <= 0) return 0.0;
    return z > n_ ? neg_inf : lt_[static_cast<std::size_t>(z)];
  }

  // log P(M- <= -a, M+ >= b)
  double log_cover(long a, long b) const {
    if (a <= 0) return log_max_tail(b);
    if (b <= 0) return log_max_tail(a);
    SignedLogSum acc;
    for (long j = 1;; ++j) {
      long y1 = j * a + (j + 1) * b, y2 = (j + 1) * a + j * b;
      if (y1 > n_ && y2 > n_) break;
      double t = log_add(log_max_tail(y1), log_max_tail(y2));
      acc.add_log(t, (j & 1) ? 1 : -1);
      if (j >= 2 && t < acc.log_scale() - 60.0) break;
    }
    SignedLog s = acc.total();
    return s.sign > 0 ? s.log_abs : neg_inf;
  }

  // log P(-a <= M-, M+ <= b)
  double log_survival(long a, long b) const {
    if (a < 0 || b < 0) return neg_inf;
    return width_table(a + b)[static_cast<std::size_t>(a)];
  }

  // log P(M- < -a or M+ > b), without forming 1 - q when q is close to one
  double log_escape(long a, long b) const {
    double lq = log_survival(a, b);
    if (lq < -0.6931471805599453) return log_sub(0.0, lq);
    SignedLogSum acc;
    acc.add_log(log_max_tail(a + 1));
    acc.add_log(log_max_tail(b + 1));
    acc.add_log(log_cover(a + 1, b + 1), -1);
    SignedLog s = acc.total();
    return s.sign > 0 ? s.log_abs : neg_inf;
  }

  // Below this width the survival form is the better conditioned of the two.
  bool narrow(long a, long b) const { return 4 * (a + b) * (a + b) < 3 * n_; }

  // log P(M- = -a, M+ = b)
  double log_cell(long a, long b) const {
    if (a < 0 || b < 0 || a + b > n_) return neg_inf;
    if (a + b == 0) return n_ == 0 ? 0.0 : neg_inf;
    return narrow(a, b) ? log_cell_confined(a, b) : log_cell_image(a, b);
  }

  double log_cell_confined(long a, long b) const {
    SignedLogSum acc;
    acc.add_log(log_survival(a, b), 1);
    acc.add_log(log_survival(a - 1, b), -1);
    acc.add_log(log_survival(a, b - 1), -1);
    acc.add_log(log_survival(a - 1, b - 1), 1);
    SignedLog s = acc.total();
    return s.sign > 0 ? s.log_abs : neg_inf;
  }

  // Second difference of the reflection series for P(M- <= -a, M+ >= b). Each term
  // reduces to sums of m(z) - m(z + c) >= 0, evaluated from exact pmf ratios.
  double log_cell_image(long a, long b) const {
    SignedLogSum acc;
    for (long j = 1;; ++j) {
      long y1 = j * a + (j + 1) * b, y2 = (j + 1) * a + j * b;
      if (y1 > n_ && y2 > n_) break;
      double t = log_add(block(y1, j, j + 1), block(y2, j + 1, j));
      acc.add_log(t, (j & 1) ? 1 : -1);
      if (j >= 2 && t < acc.log_scale() - 60.0) break;
    }
    SignedLog s = acc.total();
    return s.sign > 0 ? s.log_abs : neg_inf;
  }

  // log P(stay in [-a,b], S_n = x)
  double log_confined_endpoint(long a, long b, long x) const {
    if (a < 0 || b < 0 || x < -a || x > b || ((x + n_) & 1)) return neg_inf;
    std::vector<std::pair<long, long>> terms;
    box_terms(a, b, x, 1, terms);
    return collect(terms);
  }

  // log P(M- = -a, M+ = b, S_n = x)
  double log_cell_endpoint(long a, long b, long x) const {
    if (a < 0 || b < 0 || x < -a || x > b || a + b > n_ || ((x + n_) & 1)) return neg_inf;
    if (a + b == 0) return n_ == 0 ? 0.0 : neg_inf;
    if ((a + b + 2) * (a + b + 2) < 4 * n_) return log_cell_endpoint_spectral(a, b, x);
    std::vector<std::pair<long, long>> terms;
    box_terms(a, b, x, 1, terms);
    box_terms(a - 1, b, x, -1, terms);
    box_terms(a, b - 1, x, -1, terms);
    box_terms(a - 1, b - 1, x, 1, terms);
    return collect(terms);
  }

  double log_cell_endpoint_spectral(long a, long b, long x) const {
    SignedLogSum acc;
    spectral_box(a, b, x, 1, acc);
    spectral_box(a - 1, b, x, -1, acc);
    spectral_box(a, b - 1, x, -1, acc);
    spectral_box(a - 1, b - 1, x, 1, acc);
    SignedLog s = acc.total();
    return s.sign > 0 ? s.log_abs : neg_inf;
  }

  const std::vector<double>& width_table(long w) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto& t = cache_->tables;
    if (t.size() <= static_cast<std::size_t>(w)) t.resize(static_cast<std::size_t>(w + 1));
    auto& slot = t[static_cast<std::size_t>(w)];
    if (!slot) slot = std::make_unique<std::vector<double>>(confined_survival_all(n_, w));
    return *slot;
  }

 private:
  long double lm(long z) const {
    if (z > n_) return -std::numeric_limits<long double>::infinity();
    return lp_[static_cast<std::size_t>(((z + n_) & 1) ? z + 1 : z)];
  }

  // log(m(z) - m(z + c)), z >= 0, c >= 1
  double log_m_drop(long z, long c) const {
    long z1 = ((z + n_) & 1) ? z + 1 : z;
    long z2 = ((z + c + n_) & 1) ? z + c + 1 : z + c;
    if (z1 > n_) return neg_inf;
    double l1 = static_cast<double>(lp_[static_cast<std::size_t>(z1)]);
    if (z2 > n_) return l1;
    if (z1 == z2) return neg_inf;
    double d = static_cast<double>(lp_[static_cast<std::size_t>(z2)] - lp_[static_cast<std::size_t>(z1)]);
    return l1 + std::log(-std::expm1(d));
  }

  // log sum_{i<ca} (m(y+i) - m(y+cb+i))
  double block(long y, long ca, long cb) const {
    double s = neg_inf;
    for (long i = 0; i < ca && y + i <= n_; ++i) s = log_add(s, log_m_drop(y + i, cb));
    return s;
  }

  // Image terms of P(stay in [-a,b], S_n = x) as (|y|, coefficient) pairs of p(y).
  void box_terms(long a, long b, long x, long coef, std::vector<std::pair<long, long>>& out) const {
    if (a < 0 || b < 0 || x < -a || x > b) return;
    const long period = 2 * (a + b + 2);
    auto emit = [&](long base, long c) {
      // all k with |base + k*period| <= n
      long kmin = -((n_ + base) / period) - 1, kmax = (n_ - base) / period + 1;
      for (long k = kmin; k <= kmax; ++k) {
        long y = base + k * period;
        if (y >= -n_ && y <= n_) out.emplace_back(std::labs(y), c);
      }
    };
    emit(x, coef);
    emit(2 * b + 2 - x, -coef);
  }

  double collect(std::vector<std::pair<long, long>>& terms) const {
    std::sort(terms.begin(), terms.end());
    SignedLogSum acc;
    for (std::size_t i = 0; i < terms.size();) {
      long y = terms[i].first, c = 0;
      for (; i < terms.size() && terms[i].first == y; ++i) c += terms[i].second;
      if (c != 0) acc.add_log(log_pmf(y) + std::log(static_cast<double>(std::labs(c))), c > 0 ? 1 : -1);
    }
    SignedLog s = acc.total();
    return s.sign > 0 ? s.log_abs : neg_inf;
  }

  void spectral_box(long a, long b, long x, int coef, SignedLogSum& acc) const {
    if (a < 0 || b < 0 || x < -a || x > b) return;
    const long m = a + b + 2;
    for (long j = 1; j < m; ++j) {
      double c = cos_pi_ratio(j, m);
      double s0 = sin_pi_ratio(j * (a + 1), m), sx = sin_pi_ratio(j * (x + a + 1), m);
      if (c == 0.0 || s0 == 0.0 || sx == 0.0) continue;
      double lw = std::log(2.0 / static_cast<double>(m)) + std::log(std::fabs(s0 * sx)) +
                  static_cast<double>(n_) * std::log(std::fabs(c));
      int sg = coef * ((c < 0 && (n_ & 1)) ? -1 : 1) * (s0 * sx > 0 ? 1 : -1);
      acc.add_log(lw, sg);
    }
  }

  struct WidthCache {
    std::mutex mu;
    std::vector<std::unique_ptr<std::vector<double>>> tables;
  };

  long n_;
  std::vector<long double> lp_;  // log P(S_n = y), y >= 0
  std::vector<double> lt_;       // log P(M+ >= z)
  std::shared_ptr<WidthCache> cache_;
};

inline RangeLaw range_joint_law(const WalkKernel& k, long a_max, long b_max) {
  if (a_max < 0 || b_max < 0) throw ParameterError("range window must be nonnegative");
  RangeLaw law;
  law.n = k.steps();
  law.a_max = a_max;
  law.b_max = b_max;
  law.log_cells.assign(static_cast<std::size_t>((a_max + 1) * (b_max + 1)), neg_inf);
  for (long a = 0; a <= a_max; ++a)
    for (long b = 0; b <= b_max; ++b) law.log_cells[static_cast<std::size_t>(a * (b_max + 1) + b)] = k.log_cell(a, b);
  law.log_overflow = k.log_escape(a_max, b_max);
  return law;
}

inline RangeLaw range_joint_law(long n, long a_max, long b_max) { return range_joint_law(WalkKernel(n), a_max, b_max); }

inline RangeEndpointLaw range_endpoint_joint_law(const WalkKernel& k, long a_max, long b_max) {
  if (a_max < 0 || b_max < 0) throw ParameterError("range window must be nonnegative");
  RangeEndpointLaw law;
  law.n = k.steps();
  law.a_max = a_max;
  law.b_max = b_max;
  law.offset.resize(static_cast<std::size_t>((a_max + 1) * (b_max + 1)));
  std::size_t off = 0;
  for (long a = 0; a <= a_max; ++a)
    for (long b = 0; b <= b_max; ++b) {
      law.offset[static_cast<std::size_t>(a * (b_max + 1) + b)] = off;
      off += static_cast<std::size_t>(a + b + 1);
    }
  law.log_values.assign(off, neg_inf);
  for (long a = 0; a <= a_max; ++a)
    for (long b = 0; b <= b_max; ++b) {
      std::size_t o = law.offset[static_cast<std::size_t>(a * (b_max + 1) + b)];
      for (long x = -a; x <= b; ++x) law.log_values[o + static_cast<std::size_t>(x + a)] = k.log_cell_endpoint(a, b, x);
    }
  law.log_overflow = k.log_escape(a_max, b_max);
  return law;
}

inline RangeEndpointLaw range_endpoint_joint_law(long n, long a_max, long b_max) {
  return range_endpoint_joint_law(WalkKernel(n), a_max, b_max);
}

}  // namespace polylab
