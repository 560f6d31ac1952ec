// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace polylab {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

// log(e^a + e^b)
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == neg_inf) return a;
  return a + std::log1p(std::exp(b - a));
}

// log(e^a - e^b), a >= b
inline double log_sub(double a, double b) {
  if (b == neg_inf) return a;
  if (b >= a) return neg_inf;
  double d = b - a;
  return a + (d > -0.6931471805599453 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d)));
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = neg_inf;
  for (double x : xs) m = std::max(m, x);
  if (m == neg_inf || m == pos_inf) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Probability stored by its logarithm; -inf is zero.
struct LogProb {
  double log_value = neg_inf;
  double value() const { return std::exp(log_value); }
  bool is_zero() const { return log_value == neg_inf; }
};

// Real number as sign * exp(log_abs).
struct SignedLog {
  double log_abs = neg_inf;
  int sign = 0;

  static SignedLog from(double x) {
    if (x == 0.0) return {};
    return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
  }
  static SignedLog from_log(double l, int s = 1) {
    if (l == neg_inf || s == 0) return {};
    return {l, s > 0 ? 1 : -1};
  }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  SignedLog operator-() const { return {log_abs, -sign}; }
  SignedLog operator+(const SignedLog& o) const {
    if (o.sign == 0) return *this;
    if (sign == 0) return o;
    if (sign == o.sign) return {log_add(log_abs, o.log_abs), sign};
    if (log_abs == o.log_abs) return {};
    if (log_abs > o.log_abs) return from_log(log_sub(log_abs, o.log_abs), sign);
    return from_log(log_sub(o.log_abs, log_abs), o.sign);
  }
  SignedLog operator-(const SignedLog& o) const { return *this + (-o); }
  SignedLog operator*(const SignedLog& o) const {
    if (sign == 0 || o.sign == 0) return {};
    return {log_abs + o.log_abs, sign * o.sign};
  }
};

// Running sum of signed terms given in log form. Positive and negative parts
// are kept apart so cancellation happens once, at the end.
class SignedLogSum {
 public:
  void add_log(double l, int s = 1) {
    if (l == neg_inf || s == 0) return;
    if (s > 0) pos_ = log_add(pos_, l);
    else neg_ = log_add(neg_, l);
  }
  void add(const SignedLog& x) { add_log(x.log_abs, x.sign); }
  double log_pos() const { return pos_; }
  double log_neg() const { return neg_; }
  double log_scale() const { return std::max(pos_, neg_); }
  SignedLog total() const {
    return SignedLog::from_log(pos_, 1) + SignedLog::from_log(neg_, -1);
  }

 private:
  double pos_ = neg_inf;
  double neg_ = neg_inf;
};

}  // namespace polylab
