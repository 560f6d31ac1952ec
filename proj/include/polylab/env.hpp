// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace polylab {

struct DisorderSpec {
  double alpha = 2.0;
  double p = 0.5;  // weight of the positive tail
  std::uint64_t seed = 0;

  double q() const { return 1.0 - p; }
  void validate() const {
    check_alpha(alpha);
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0,1]");
  }
};

// Mean of the signed Pareto variable; subtracted when 1 < alpha < 2.
inline double centering_constant(const DisorderSpec& s) {
  if (s.alpha == 2.0 || s.alpha < 1.0) return 0.0;
  return (s.p - s.q()) * s.alpha / (s.alpha - 1.0);
}

// Uncentered draw at site x. For alpha < 2: V = U^{-1/alpha} so P(V > t) = t^{-alpha}.
inline double raw_disorder(const DisorderSpec& s, std::int64_t x) {
  if (s.alpha == 2.0) return counter_normal(s.seed, x, 0);
  double u = counter_uniform(s.seed, x, 0);
  double v = std::pow(u, -1.0 / s.alpha);
  return counter_uniform(s.seed, x, 1) < s.p ? v : -v;
}

struct PartialSums {
  std::vector<double> plus;   // plus[j] = sum_{x=0}^{j} w_x
  std::vector<double> minus;  // minus[j] = sum_{x=-j}^{-1} w_x, minus[0] = 0
};

class Environment {
 public:
  using Field = std::function<double(std::int64_t)>;

  explicit Environment(DisorderSpec spec) : spec_(spec), shift_(0.0), cache_(std::make_shared<Cache>()) {
    spec_.validate();
    shift_ = centering_constant(spec_);
  }

  // Environment with prescribed site values; the spec only records alpha for rescaling.
  Environment(DisorderSpec spec, Field field) : Environment(spec) { field_ = std::move(field); }

  const DisorderSpec& spec() const { return spec_; }
  double centering() const { return shift_; }

  double omega(std::int64_t x) const {
    if (field_) return field_(x);
    return raw_disorder(spec_, x) - shift_;
  }

  // Prefix sums up to index l. The cache is shared between copies and grows under a lock.
  PartialSums partial_sums(std::size_t l) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto& c = *cache_;
    if (c.plus.empty()) {
      c.plus.push_back(omega(0));
      c.minus.push_back(0.0);
    }
    while (c.plus.size() <= l) {
      auto j = static_cast<std::int64_t>(c.plus.size());
      c.plus.push_back(c.plus.back() + omega(j));
      c.minus.push_back(c.minus.back() + omega(-j));
    }
    PartialSums out;
    out.plus.assign(c.plus.begin(), c.plus.begin() + static_cast<std::ptrdiff_t>(l + 1));
    out.minus.assign(c.minus.begin(), c.minus.begin() + static_cast<std::ptrdiff_t>(l + 1));
    return out;
  }

 private:
  struct Cache {
    std::mutex mu;
    std::vector<double> plus, minus;
  };
  DisorderSpec spec_;
  double shift_;
  Field field_;
  std::shared_ptr<Cache> cache_;
};

inline Environment make_environment(const DisorderSpec& spec) { return Environment(spec); }

inline PartialSums partial_sums(const Environment& env, std::size_t l) { return env.partial_sums(l); }

inline double omega_star(const PartialSums& ps, std::size_t l) {
  double mp = 0.0, mm = 0.0;
  for (std::size_t j = 0; j <= l; ++j) {
    mp = std::max(mp, std::fabs(ps.plus[j]));
    mm = std::max(mm, std::fabs(ps.minus[j]));
  }
  return mm + mp;
}

inline double omega_star(const Environment& env, std::size_t l) { return omega_star(env.partial_sums(l), l); }

// X^{(n)}_t on the lattice t = k/n.
inline double coupled_value(const PartialSums& ps, double alpha, double n, std::int64_t k) {
  double s = std::pow(n, -1.0 / alpha);
  if (k >= 0) return s * ps.plus[static_cast<std::size_t>(k)];
  return -s * ps.minus[static_cast<std::size_t>(-k)];
}

inline double coupled_path(const Environment& env, double n, double t) {
  if (!(n >= 1.0)) throw ParameterError("coupled_path needs n >= 1");
  // snap to the lattice so that t = k/n maps back to k
  auto k = static_cast<std::int64_t>(std::floor(std::fabs(t) * n + 1e-9));
  auto ps = env.partial_sums(static_cast<std::size_t>(k));
  return coupled_value(ps, env.spec().alpha, n, t < 0 ? -k : k);
}

// Omega*_l for each of `reps` replicate environments derived from spec.seed.
inline std::vector<double> omega_star_samples(const DisorderSpec& spec, std::size_t l, std::size_t reps) {
  spec.validate();
  std::vector<double> out(reps);
  double m = centering_constant(spec);
  for (std::size_t r = 0; r < reps; ++r) {
    DisorderSpec s = spec;
    s.seed = derive_seed(spec.seed, r);
    double sp = 0.0, sm = 0.0, mp = 0.0, mm = 0.0;
    for (std::size_t j = 0; j <= l; ++j) {
      sp += raw_disorder(s, static_cast<std::int64_t>(j)) - m;
      mp = std::max(mp, std::fabs(sp));
      if (j > 0) {
        sm += raw_disorder(s, -static_cast<std::int64_t>(j)) - m;
        mm = std::max(mm, std::fabs(sm));
      }
    }
    out[r] = mp + mm;
  }
  return out;
}

struct TailEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

inline TailEstimate tail_fraction(const std::vector<double>& samples, double t) {
  auto hits = std::count_if(samples.begin(), samples.end(), [t](double s) { return s > t; });
  double n = static_cast<double>(samples.size());
  double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

inline TailEstimate tail_bound_estimate(const DisorderSpec& spec, std::size_t l, double t, std::size_t reps) {
  if (reps < 100) throw ParameterError("tail_bound_estimate needs reps >= 100");
  return tail_fraction(omega_star_samples(spec, l, reps), t);
}

}  // namespace polylab
