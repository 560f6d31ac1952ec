#include <gtest/gtest.h>

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "oracles.hpp"
#include "polylab/srw_exact.hpp"

using namespace polylab;

namespace {

double rel(double x, double ref) { return std::fabs(x - ref) / std::max(std::fabs(ref), 1e-300); }

}  // namespace

TEST(ConfinedSurvival, SmallCasesByHand) {
  EXPECT_NEAR(confined_survival_dp(4, 1, 1).value(), 0.25, 1e-15);
  EXPECT_NEAR(confined_survival_spectral(4, 1, 1).value(), 0.25, 1e-15);
  EXPECT_NEAR(confined_survival_dp(2, 0, 1).value(), 0.25, 1e-15);
  EXPECT_NEAR(confined_survival_spectral(2, 0, 1).value(), 0.25, 1e-15);
  EXPECT_EQ(confined_survival_dp(7, 7, 7).log_value, 0.0);
  EXPECT_NEAR(confined_survival_spectral(7, 7, 7).value(), 1.0, 1e-14);
  EXPECT_TRUE(confined_survival_dp(3, 0, 0).is_zero());
}

TEST(ConfinedSurvival, MatchesEnumeration) {
  for (int n = 1; n <= 12; ++n)
    for (long a = 0; a <= 4; ++a)
      for (long b = 0; b <= 4; ++b) {
        if (a + b == 0) continue;
        double ref = oracle::confined(n, a, b);
        EXPECT_LT(rel(confined_survival_dp(n, a, b).value(), ref), 1e-13) << n << " " << a << " " << b;
        EXPECT_LT(rel(confined_survival_spectral(n, a, b).value(), ref), 1e-12) << n << " " << a << " " << b;
      }
}

TEST(ConfinedSurvival, DpAndSpectralAgreeOnAllStarts) {
  double worst = 0.0;
  for (long n = 0; n <= 64; ++n)
    for (long w = 1; w <= 12; ++w) {
      auto d = confined_survival_dp_all(n, w);
      auto s = confined_survival_spectral_all(n, w);
      for (long i = 0; i <= w; ++i) worst = std::max(worst, std::fabs(std::expm1(s[i] - d[i])));
    }
  EXPECT_LT(worst, 1e-12);
}

TEST(ConfinedSurvival, DecayRateIsTopEigenvalue) {
  long w = 6, n = 20000;
  double lq = confined_survival_spectral(n, 3, 3).log_value;
  EXPECT_NEAR(lq / n, std::log(std::cos(std::numbers::pi / (w + 2))), 1e-4);
}

TEST(MaxTail, EdgesAndEnumeration) {
  EXPECT_EQ(max_tail(10, 0).log_value, 0.0);
  EXPECT_NEAR(max_tail(10, 10).log_value, -10 * std::log(2.0), 1e-12);
  EXPECT_TRUE(max_tail(10, 11).is_zero());
  for (int n = 1; n <= 14; ++n)
    for (long m = 1; m <= n; ++m) EXPECT_LT(rel(max_tail(n, m).value(), oracle::max_tail(n, m)), 1e-13);
  WalkKernel k(14);
  for (long m = 0; m <= 14; ++m) EXPECT_NEAR(k.log_max_tail(m), max_tail(14, m).log_value, 1e-13);
  EXPECT_TRUE(std::isinf(k.log_max_tail(15)));
}

TEST(RangeLaw, HandCases) {
  auto l2 = range_joint_law(2, 2, 2);
  EXPECT_NEAR(std::exp(l2.log_at(0, 1)), 0.25, 1e-15);
  EXPECT_NEAR(std::exp(l2.log_at(0, 2)), 0.25, 1e-15);
  EXPECT_NEAR(std::exp(l2.log_at(1, 0)), 0.25, 1e-15);
  EXPECT_NEAR(std::exp(l2.log_at(2, 0)), 0.25, 1e-15);
  EXPECT_TRUE(std::isinf(l2.log_at(1, 1)));
  auto l1 = range_joint_law(1, 1, 1);
  EXPECT_NEAR(std::exp(l1.log_at(0, 1)), 0.5, 1e-15);
  EXPECT_NEAR(std::exp(l1.log_at(1, 0)), 0.5, 1e-15);
  EXPECT_NEAR(range_joint_law(12, 12, 12).total_mass(), 1.0, 1e-12);
}

TEST(RangeLaw, MatchesEnumerationCellwise) {
  for (int n = 1; n <= 16; ++n) {
    auto ref = oracle::range_law(n);
    WalkKernel k(n);
    for (long a = 0; a <= n; ++a)
      for (long b = 0; a + b <= n; ++b) {
        auto it = ref.find({a, b});
        double r = it == ref.end() ? 0.0 : it->second;
        double v = std::exp(k.log_cell(a, b));
        if (r == 0.0) EXPECT_EQ(v, 0.0) << n << " " << a << " " << b;
        else EXPECT_LT(rel(v, r), 1e-12) << n << " " << a << " " << b;
      }
  }
}

// Both forms are exact; near the crossover width both are also well conditioned.
TEST(RangeLaw, ImageAndConfinedFormsAgree) {
  for (long n : {40L, 100L, 257L, 1000L}) {
    WalkKernel k(n);
    for (long a = 0; a <= 40; ++a)
      for (long b = 0; b <= 40; ++b) {
        long w2 = (a + b) * (a + b);
        if (a + b == 0 || 2 * w2 < n || w2 > n) continue;
        double x = k.log_cell_image(a, b), y = k.log_cell_confined(a, b);
        if (std::isinf(y)) continue;
        EXPECT_LT(std::fabs(std::expm1(x - y)), 1e-10) << n << " " << a << " " << b;
      }
  }
}

TEST(RangeLaw, OverflowCompletesMass) {
  for (long n : {30L, 200L, 1000L}) {
    auto law = range_joint_law(n, 9, 14);
    EXPECT_NEAR(law.total_mass(), 1.0, 1e-12) << n;
  }
  WalkKernel k(500);
  for (long a = 0; a <= 20; ++a)
    for (long b = 0; b <= 20; ++b)
      if (a + b > 0) EXPECT_LE(std::fabs(std::expm1(k.log_cell(a, b) - k.log_cell(b, a))), 1e-13);
}

// Path counts in exact integer arithmetic, beyond the reach of enumeration.
TEST(RangeLaw, MatchesExactIntegerCounts) {
  using boost::multiprecision::cpp_int;
  const long n = 600, amax = 40;
  std::vector<std::vector<cpp_int>> counts(2 * amax + 1);
  for (long w = 0; w <= 2 * amax; ++w) {
    std::vector<cpp_int> f(w + 1, 1), g(w + 1);
    for (long s = 0; s < n; ++s) {
      for (long i = 0; i <= w; ++i) g[i] = (i > 0 ? f[i - 1] : cpp_int(0)) + (i < w ? f[i + 1] : cpp_int(0));
      std::swap(f, g);
    }
    counts[w] = f;
  }
  auto q = [&](long a, long b) { return a < 0 || b < 0 ? cpp_int(0) : counts[a + b][a]; };
  WalkKernel k(n);
  double worst = 0.0;
  for (long a = 0; a <= amax; ++a)
    for (long b = 0; b <= amax; ++b) {
      if (a + b == 0) continue;
      cpp_int c = q(a, b) - q(a - 1, b) - q(a, b - 1) + q(a - 1, b - 1);
      long shift = std::max<long>(0, static_cast<long>(msb(c)) - 60);
      double ref = std::log(static_cast<double>(c >> shift)) + (shift - n) * std::log(2.0);
      worst = std::max(worst, std::fabs(std::expm1(k.log_cell(a, b) - ref)));
    }
  EXPECT_LT(worst, 1e-12);
}

TEST(RangeEndpointLaw, MatchesEnumeration) {
  auto l2 = range_endpoint_joint_law(2, 2, 2);
  EXPECT_NEAR(std::exp(l2.log_at(0, 1, 0)), 0.25, 1e-15);
  for (int n = 1; n <= 14; ++n) {
    auto ref = oracle::range_endpoint_law(n);
    auto law = range_endpoint_joint_law(n, n, n);
    for (long a = 0; a <= n; ++a)
      for (long b = 0; a + b <= n; ++b)
        for (long x = -a; x <= b; ++x) {
          auto it = ref.find({a, b, x});
          double r = it == ref.end() ? 0.0 : it->second;
          double v = std::exp(law.log_at(a, b, x));
          if (r == 0.0) EXPECT_LT(v, 1e-300) << n << " " << a << " " << b << " " << x;
          else EXPECT_LT(rel(v, r), 1e-10) << n << " " << a << " " << b << " " << x;
        }
  }
}

TEST(RangeEndpointLaw, MarginalizesToRangeLaw) {
  for (long n : {17L, 64L, 150L}) {
    WalkKernel k(n);
    for (long a = 0; a <= 10; ++a)
      for (long b = 0; b <= 10; ++b) {
        if (a + b == 0) continue;
        double s = 0.0;
        for (long x = -a; x <= b; ++x) s += std::exp(k.log_cell_endpoint(a, b, x));
        double c = std::exp(k.log_cell(a, b));
        EXPECT_LE(std::fabs(s - c), 1e-12) << n << " " << a << " " << b;
        EXPECT_LE(std::fabs(s - c), 1e-9 * c + 1e-16) << n << " " << a << " " << b;
      }
  }
}
